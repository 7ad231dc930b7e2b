#pragma once

// Grand canonical occupations of the trap levels E_k = k (Boltzmann constant
// set to one), the chemical potential at fixed mean particle number, and the
// truncation index for a given tail budget.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatent {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// <n_k> = 1 / (exp((k - mu)/T) - 1).
inline double bose_occupation(int k, double T, double mu) {
  if (!(T > 0.0)) throw std::domain_error("temperature must be positive");
  if (!(mu < 0.0)) throw std::domain_error("chemical potential must be negative");
  if (k < 0) throw std::invalid_argument("mode index must be non-negative");
  const double x = (k - mu) / T;
  if (x > 745.0) return 0.0;
  return 1.0 / std::expm1(x);
}

namespace detail {

inline void check_thermal_args(double T, double mu) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::domain_error("temperature must be positive");
  if (!(mu < 0.0)) throw std::domain_error("chemical potential must be negative");
}

/// Sum over k >= K of <n_k> by expanding each occupation in its geometric
/// series: sum_j exp(-j (K - mu)/T) / (1 - exp(-j/T)). Also returns the
/// mu-derivative of the same tail.
struct TailSum {
  double value = 0.0;
  double derivative = 0.0;
};

inline TailSum occupation_tail(int K, double T, double mu) {
  const double x = (K - mu) / T;
  TailSum tail;
  for (int j = 1; j < 10000; ++j) {
    const double e = std::exp(-j * x);
    if (e == 0.0) break;
    const double term = e / -std::expm1(-j / T);
    tail.value += term;
    tail.derivative += term * j / T;
    if (term <= 1e-18 * tail.value) break;
  }
  return tail;
}

/// First index with (k - mu)/T >= 3; beyond it the tail series converges
/// at least as fast as exp(-3 j).
inline int direct_sum_length(double T, double mu) {
  const double k = std::ceil(3.0 * T + mu);
  return k < 1.0 ? 1 : static_cast<int>(k);
}

}  // namespace detail

/// <N>(T, mu) = sum_{k>=0} <n_k>, untruncated.
inline double mean_number(double T, double mu) {
  detail::check_thermal_args(T, mu);
  const int K = detail::direct_sum_length(T, mu);
  double sum = 0.0;
  for (int k = 0; k < K; ++k) sum += 1.0 / std::expm1((k - mu) / T);
  return sum + detail::occupation_tail(K, T, mu).value;
}

/// d<N>/dmu.
inline double mean_number_derivative(double T, double mu) {
  detail::check_thermal_args(T, mu);
  const int K = detail::direct_sum_length(T, mu);
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    const double n = 1.0 / std::expm1((k - mu) / T);
    sum += n * (n + 1.0) / T;
  }
  return sum + detail::occupation_tail(K, T, mu).derivative;
}

/// Chemical potential mu < 0 with <N>(T, mu) = n_target.
///
/// Bracketed bisection on the strictly increasing <N>(mu), polished by
/// safeguarded Newton steps. The upper end of the bracket is the mu at which
/// the ground state alone holds n_target particles.
inline double solve_chemical_potential(double T, double n_target, double tol = 1e-12) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::domain_error("temperature must be positive");
  if (!(n_target > 0.0) || !std::isfinite(n_target))
    throw std::domain_error("target particle number must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  double hi = -T * std::log1p(1.0 / n_target);
  if (!(hi < 0.0)) hi = -std::numeric_limits<double>::denorm_min();
  double lo = hi - 50.0 * T;
  for (int i = 0; mean_number(T, lo) > n_target; ++i) {
    if (i > 200) throw SolverError("could not bracket the chemical potential");
    lo -= 50.0 * T * (i + 1);
  }
  if (mean_number(T, hi) < n_target) {
    // Only possible through rounding when the ground state holds everything.
    return hi;
  }

  const auto residual = [&](double mu) { return mean_number(T, mu) - n_target; };
  double mu = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double r = residual(mu);
    if (std::abs(r) <= tol * n_target) return mu;
    if (r > 0.0) hi = mu; else lo = mu;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo)) break;
    // Newton step, falling back to bisection when it leaves the bracket.
    const double slope = mean_number_derivative(T, mu);
    double next = mu - r / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    mu = next;
  }
  const double r = residual(mu);
  if (std::abs(r) <= 1e-8 * n_target) return mu;
  throw SolverError("chemical potential solve stalled at relative residual " +
                    std::to_string(std::abs(r) / n_target));
}

/// Geometric upper bound on sum_{k>=K} <n_k>:
/// <n_K> / (1 - exp(-1/T)), since <n_{K+m}> <= <n_K> exp(-m/T).
inline double tail_bound(int K, double T, double mu) {
  detail::check_thermal_args(T, mu);
  const double x = (K - mu) / T;
  if (x > 745.0) return 0.0;
  return (1.0 / std::expm1(x)) / -std::expm1(-1.0 / T);
}

/// Smallest K with tail_bound(K) <= eps * n_target.
inline int choose_truncation(double T, double mu, double n_target, double eps) {
  detail::check_thermal_args(T, mu);
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("tail budget must lie in (0, 1)");
  const double budget = eps * n_target;
  // tail_bound is decreasing in K: jump close with the asymptotic estimate
  // then step.
  int K = 1;
  const double ratio = -std::expm1(-1.0 / T);
  const double guess = mu - T * std::log(budget * ratio);
  if (guess > 1.0) K = static_cast<int>(std::floor(guess)) - 2;
  if (K < 1) K = 1;
  while (K > 1 && tail_bound(K - 1, T, mu) <= budget) --K;
  while (tail_bound(K, T, mu) > budget) ++K;
  return K;
}

/// Solved grand canonical state, truncated to modes 0 .. K_max - 1.
struct ThermalState {
  double T = 0.0;
  double mu = 0.0;
  double n_mean = 0.0;
  int k_max = 0;
  std::vector<double> occupations;
  double tail_bound = 0.0;

  [[nodiscard]] double retained_number() const noexcept {
    double s = 0.0;
    for (double n : occupations) s += n;
    return s;
  }
  [[nodiscard]] double condensate_fraction() const {
    return occupations.empty() ? 0.0 : occupations.front() / n_mean;
  }
};

/// Occupations of modes 0 .. K-1 at (T, mu), with the tail bound for K.
inline ThermalState thermal_state_at(double T, double mu, double n_mean, int K) {
  detail::check_thermal_args(T, mu);
  if (K < 1) throw std::invalid_argument("truncation must keep at least one mode");
  ThermalState s;
  s.T = T;
  s.mu = mu;
  s.n_mean = n_mean;
  s.k_max = K;
  s.occupations.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) s.occupations[static_cast<std::size_t>(k)] = bose_occupation(k, T, mu);
  s.tail_bound = spatent::tail_bound(K, T, mu);
  return s;
}

/// Solve mu for (T, n_target), pick K_max for the tail budget eps and fill
/// the occupation table.
inline ThermalState make_thermal_state(double T, double n_target, double eps = 1e-8,
                                       double solver_tol = 1e-12) {
  const double mu = solve_chemical_potential(T, n_target, solver_tol);
  const int K = choose_truncation(T, mu, n_target, eps);
  return thermal_state_at(T, mu, n_target, K);
}

}  // namespace spatent
