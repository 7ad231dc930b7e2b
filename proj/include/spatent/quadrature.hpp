#pragma once

// Globally adaptive Gauss-Kronrod integration (QUADPACK qag strategy): the
// interval with the largest error estimate is bisected until the summed
// estimate meets the tolerance. Node tables come from Boost.Math.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace spatent {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

struct Segment {
  double lo = 0.0, hi = 0.0, value = 0.0, error = 0.0;
  bool operator<(const Segment& o) const noexcept { return error < o.error; }
};

/// One 31-point Kronrod / 15-point Gauss pair on [lo, hi] with the QUADPACK
/// error scaling err = resasc * min(1, (200 |K - G| / resasc)^1.5).
template <typename F>
Segment kronrod_segment(F& f, double lo, double hi) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using gauss = boost::math::quadrature::gauss<double, 15>;
  const auto& xk = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  // Non-negative Kronrod abscissae in ascending order; index 0 is the centre
  // and the even indices are the Gauss nodes.
  std::vector<double> fv(2 * xk.size() - 1);
  fv[0] = f(centre);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    fv[2 * i - 1] = f(centre - half * xk[i]);
    fv[2 * i] = f(centre + half * xk[i]);
  }
  double k = wk[0] * fv[0];
  double g = wg[0] * fv[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double pair = fv[2 * i - 1] + fv[2 * i];
    k += wk[i] * pair;
    if (i % 2 == 0) g += wg[i / 2] * pair;
  }
  const double mean = 0.5 * k;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < xk.size(); ++i)
    resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  k *= half;
  g *= half;
  resasc *= std::abs(half);

  double err = std::abs(k - g);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return {lo, hi, k, err};
}

}  // namespace detail

/// int_lo^hi f(x) dx to absolute tolerance `tol`.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double lo, double hi, double tol, int max_intervals = 2000) {
  QuadratureResult r;
  if (!(hi > lo)) {
    r.converged = true;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::kronrod_segment(f, lo, hi));
  double value = heap.top().value;
  double error = heap.top().error;
  constexpr double round_off = 50.0 * 2.220446049250313e-16;
  while (error > std::max(tol, round_off * std::abs(value)) &&
         static_cast<int>(heap.size()) < max_intervals) {
    const detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push(worst);
      break;
    }
    const detail::Segment left = detail::kronrod_segment(f, worst.lo, mid);
    const detail::Segment right = detail::kronrod_segment(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated update rounding.
  r.intervals = static_cast<int>(heap.size());
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = value;
  r.error = error;
  r.converged = error <= std::max(tol, round_off * std::abs(value));
  return r;
}

}  // namespace spatent
