#pragma once

// Region-restricted probabilities and overlaps of trap eigenfunctions for a
// split of the line into A = (-inf, a] and B = (a, inf).
//
// Two independent routes are provided:
//  * adaptive Gauss-Kronrod quadrature of phi_k phi_l over a truncated
//    window (region_probability, overlap, OverlapTable::quadrature);
//  * closed forms (OverlapTable::closed_form). Off-diagonal integrals follow
//    from the Wronskian of the oscillator equation,
//        int_{-inf}^a phi_k phi_l = (phi_l phi_k' - phi_k phi_l')(a) / (2 (l - k)),
//    and the diagonal from the ladder recurrence
//        P_{k+1}(a) = P_k(a) - phi_k(a) phi_{k+1}(a) / sqrt(2 (k + 1)),
//    seeded with P_0(a) = erfc(-a) / 2.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatent/hermite.hpp"
#include "spatent/quadrature.hpp"

namespace spatent {

enum class Region { A, B };

/// Demarcation point a. A = (-inf, a], B = (a, inf).
struct RegionSplit {
  double a = 0.0;
  /// Absolute tolerance for quadrature-backed quantities.
  double quadrature_tol = 1e-13;

  [[nodiscard]] bool symmetric() const noexcept { return a == 0.0; }
};

/// Quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " + format_error(achieved) + ")"),
        achieved_error_(achieved) {}

  [[nodiscard]] double achieved_error() const noexcept { return achieved_error_; }

 private:
  static std::string format_error(double e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", e);
    return buf;
  }
  double achieved_error_;
};

struct BunchingProbabilities {
  double aa = 0.0;  // both bosons in A
  double bb = 0.0;  // both bosons in B
  double ab = 0.0;  // one in each
};

namespace detail {

/// Half-width beyond which phi_k^2 is below ~1e-30 for every k <= kmax.
inline double integration_half_width(int kmax) {
  return std::sqrt(2.0 * kmax + 1.0) + 8.0;
}

/// int_{lo}^{hi} phi_k phi_l dx by adaptive Gauss-Kronrod.
inline double integrate_product(int k, int l, double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  const int kmax = std::max(k, l);
  std::vector<double> buf(static_cast<std::size_t>(kmax) + 1);
  auto f = [&](double x) {
    eval_eigenfunctions<double>(kmax, x, buf);
    return buf[static_cast<std::size_t>(k)] * buf[static_cast<std::size_t>(l)];
  };
  // Split at the origin so both halves of a symmetric window see mirrored
  // node sets.
  double total = 0.0;
  double total_error = 0.0;
  const auto piece = [&](double from, double to) {
    const QuadratureResult r = integrate_adaptive(f, from, to, 0.5 * tol);
    total += r.value;
    total_error += r.error;
  };
  if (lo < 0.0 && hi > 0.0) {
    piece(lo, 0.0);
    piece(0.0, hi);
  } else {
    piece(lo, hi);
  }
  if (!(total_error <= tol))
    throw QuadratureError("integral of phi_" + std::to_string(k) + " phi_" + std::to_string(l) +
                              " did not converge",
                          total_error);
  return total;
}

inline void check_pair(int k, int l) {
  if (k < 0 || l < 0) throw std::invalid_argument("mode index must be non-negative");
}

}  // namespace detail

/// Unnormalized region integral int_R phi_k phi_l dx by quadrature.
inline double region_integral(int k, int l, const RegionSplit& split, Region region = Region::A) {
  detail::check_pair(k, l);
  const double x_max = detail::integration_half_width(std::max(k, l));
  if (region == Region::A)
    return detail::integrate_product(k, l, -x_max, std::min(split.a, x_max), split.quadrature_tol);
  return detail::integrate_product(k, l, std::max(split.a, -x_max), x_max, split.quadrature_tol);
}

/// p_R(k): probability of finding a particle in mode k inside region R.
inline double region_probability(int k, const RegionSplit& split, Region region = Region::A) {
  return std::clamp(region_integral(k, k, split, region), 0.0, 1.0);
}

/// Signed normalized overlap <1_k|1_l>_R = int_R phi_k phi_l / sqrt(p_R(k) p_R(l)).
inline double overlap(int k, int l, const RegionSplit& split, Region region = Region::A) {
  detail::check_pair(k, l);
  const double pk = region_probability(k, split, region);
  const double pl = k == l ? pk : region_probability(l, split, region);
  if (pk <= 0.0 || pl <= 0.0)
    throw std::domain_error("overlap undefined: mode has no support in the region");
  if (k == l) return 1.0;
  return std::clamp(region_integral(k, l, split, region) / std::sqrt(pk * pl), -1.0, 1.0);
}

/// Probabilities of finding the pair |psi_kl> with both bosons in A, both in
/// B, or split. For k == l the amplitudes are p_A(k), p_B(k) and
/// sqrt(2 p_A(k) p_B(k)).
inline BunchingProbabilities bunching_probabilities(int k, int l, const RegionSplit& split) {
  detail::check_pair(k, l);
  const double pa_k = region_probability(k, split, Region::A);
  const double pb_k = region_probability(k, split, Region::B);
  if (k == l) return {pa_k * pa_k, pb_k * pb_k, 2.0 * pa_k * pb_k};
  const double pa_l = region_probability(l, split, Region::A);
  const double pb_l = region_probability(l, split, Region::B);
  const double ga = region_integral(k, l, split, Region::A);
  const double gb = region_integral(k, l, split, Region::B);
  // p_A(k) p_A(l) (1 + O_kl^2) = p_A(k) p_A(l) + g_kl^2.
  BunchingProbabilities p;
  p.aa = pa_k * pa_l + ga * ga;
  p.bb = pb_k * pb_l + gb * gb;
  p.ab = 1.0 - p.aa - p.bb;
  return p;
}

/// Region-A Gram data for modes 0 .. K-1: the unnormalized integrals
/// g_kl = int_A phi_k phi_l together with p_A and p_B. Immutable once built.
class OverlapTable {
 public:
  enum class Method { closed_form, quadrature };

  /// Closed-form construction; O(K^2).
  static OverlapTable closed_form(int K, const RegionSplit& split) {
    check_size(K);
    OverlapTable t(K, split);
    const auto jet = eigenfunction_jet<double>(K, split.a);
    const auto& v = jet.value;
    const auto& d = jet.derivative;

    double pa = 0.5 * std::erfc(-split.a);
    double pb = 0.5 * std::erfc(split.a);
    for (int k = 0; k < K; ++k) {
      const auto i = static_cast<std::size_t>(k);
      t.p_a_[i] = split.symmetric() ? 0.5 : std::clamp(pa, 0.0, 1.0);
      t.p_b_[i] = split.symmetric() ? 0.5 : std::clamp(pb, 0.0, 1.0);
      const double step = v[i] * v[i + 1] / std::sqrt(2.0 * (k + 1));
      pa -= step;
      pb += step;
    }
    for (int k = 0; k < K; ++k) {
      t.gram_a_(k, k) = t.p_a_[static_cast<std::size_t>(k)];
      for (int l = 0; l < k; ++l) {
        double g = 0.0;
        // At a = 0 same-parity products are even, so their half-line
        // integrals vanish identically.
        if (!(split.symmetric() && (k - l) % 2 == 0)) {
          const auto ik = static_cast<std::size_t>(k);
          const auto il = static_cast<std::size_t>(l);
          g = (v[il] * d[ik] - v[ik] * d[il]) / (2.0 * (l - k));
        }
        t.gram_a_(k, l) = g;
        t.gram_a_(l, k) = g;
      }
    }
    return t;
  }

  /// Quadrature construction; used to validate the closed form.
  static OverlapTable quadrature(int K, const RegionSplit& split) {
    check_size(K);
    OverlapTable t(K, split);
    for (int k = 0; k < K; ++k) {
      const auto i = static_cast<std::size_t>(k);
      t.p_a_[i] = region_probability(k, split, Region::A);
      t.p_b_[i] = region_probability(k, split, Region::B);
      t.gram_a_(k, k) = t.p_a_[i];
      for (int l = 0; l < k; ++l) {
        const double g = region_integral(k, l, split, Region::A);
        t.gram_a_(k, l) = g;
        t.gram_a_(l, k) = g;
      }
    }
    return t;
  }

  static OverlapTable build(int K, const RegionSplit& split, Method method = Method::closed_form) {
    return method == Method::closed_form ? closed_form(K, split) : quadrature(K, split);
  }

  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] const RegionSplit& split() const noexcept { return split_; }
  [[nodiscard]] double p_a(int k) const { return p_a_.at(static_cast<std::size_t>(k)); }
  [[nodiscard]] double p_b(int k) const { return p_b_.at(static_cast<std::size_t>(k)); }
  [[nodiscard]] const std::vector<double>& p_a() const noexcept { return p_a_; }
  [[nodiscard]] const std::vector<double>& p_b() const noexcept { return p_b_; }

  /// G_kl = int_A phi_k phi_l.
  [[nodiscard]] const Eigen::MatrixXd& gram_a() const noexcept { return gram_a_; }

  /// int_B phi_k phi_l = delta_kl - G_kl, with the diagonal taken from p_B.
  [[nodiscard]] Eigen::MatrixXd gram_b() const {
    Eigen::MatrixXd g = -gram_a_;
    for (int k = 0; k < size_; ++k) g(k, k) = p_b_[static_cast<std::size_t>(k)];
    return g;
  }

  /// Normalized region-A overlap O_kl.
  [[nodiscard]] double overlap(int k, int l) const {
    if (k == l) return 1.0;
    return gram_a_(k, l) / std::sqrt(p_a(k) * p_a(l));
  }

  /// Normalized region-B overlap.
  [[nodiscard]] double overlap_b(int k, int l) const {
    if (k == l) return 1.0;
    return -gram_a_(k, l) / std::sqrt(p_b(k) * p_b(l));
  }

  /// Matrix of normalized region-A overlaps.
  [[nodiscard]] Eigen::MatrixXd overlap_matrix() const {
    Eigen::MatrixXd o(size_, size_);
    for (int k = 0; k < size_; ++k)
      for (int l = 0; l < size_; ++l) o(k, l) = overlap(k, l);
    return o;
  }

  [[nodiscard]] BunchingProbabilities bunching(int k, int l) const {
    const double pa_k = p_a(k), pb_k = p_b(k);
    if (k == l) return {pa_k * pa_k, pb_k * pb_k, 2.0 * pa_k * pb_k};
    const double g = gram_a_(k, l);
    BunchingProbabilities p;
    p.aa = pa_k * p_a(l) + g * g;
    p.bb = pb_k * p_b(l) + g * g;
    p.ab = 1.0 - p.aa - p.bb;
    return p;
  }

  /// Test hook: copy with every off-diagonal Gram entry multiplied by factor.
  [[nodiscard]] OverlapTable with_corrupted_overlaps(double factor) const {
    OverlapTable t = *this;
    for (int k = 0; k < size_; ++k)
      for (int l = 0; l < size_; ++l)
        if (k != l) t.gram_a_(k, l) *= factor;
    return t;
  }

  /// Leading K x K block.
  [[nodiscard]] OverlapTable truncated(int K) const {
    if (K < 0 || K > size_) throw std::out_of_range("OverlapTable::truncated");
    OverlapTable t(K, split_);
    t.gram_a_ = gram_a_.topLeftCorner(K, K);
    t.p_a_.assign(p_a_.begin(), p_a_.begin() + K);
    t.p_b_.assign(p_b_.begin(), p_b_.begin() + K);
    return t;
  }

 private:
  OverlapTable(int K, const RegionSplit& split)
      : size_(K),
        split_(split),
        gram_a_(Eigen::MatrixXd::Zero(K, K)),
        p_a_(static_cast<std::size_t>(K)),
        p_b_(static_cast<std::size_t>(K)) {}

  static void check_size(int K) {
    if (K < 0 || K > max_mode_index) throw std::out_of_range("OverlapTable size out of range");
  }

  int size_;
  RegionSplit split_;
  Eigen::MatrixXd gram_a_;
  std::vector<double> p_a_;
  std::vector<double> p_b_;
};

}  // namespace spatent
