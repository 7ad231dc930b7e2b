#pragma once

// Average-pair state rho(2) of the thermal gas and its spatial entanglement.
//
//   rho(2) = sum_k 2<n_k>^2/M |psi_kk><psi_kk| + sum_{k>l} <n_k><n_l>/M |psi_kl><psi_kl|
//   M      = (3 sum_k <n_k>^2 + <N>^2) / 2
//
// The partial transpose over B contains the rank-2 operator
// |chi><0| + |0><chi| on the span of the two-region vacuum and the sector
// with two bosons in each region. Its negative eigenvalue -|chi| bounds the
// negativity of rho(2) from below; lambda = |chi| (with the 1/M included).
//
// Two evaluations of <chi|chi> are provided:
//  * coherent_bunching_norm_squared: the norm of the block as it actually
//    appears in rho(2)^{T_B}, valid for any split. Writing A_k, B_k for the
//    region-restricted creators of mode k and g^A, g^B = 1 - g^A for their
//    Gram matrices,
//      M chi = (u + s)/2,  u = sum_{kl} n_k n_l A_k A_l|0> (x) B_k B_l|0>,
//                          s = sum_k n_k^2 A_k^2|0> (x) B_k^2|0>,
//    and every inner product reduces to traces of K x K matrix products.
//  * chi_norm_squared: a closed triple sum over squared normalized overlaps
//    for the symmetric split. It treats every overlap product as positive,
//    dropping the sign of the B-region overlaps
//    (int_B phi_k phi_l = -int_A phi_k phi_l for k != l), and it does not
//    agree with the block norm once excited modes are occupied. Kept for
//    comparison.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatent/fock_basis.hpp"
#include "spatent/regions.hpp"
#include "spatent/thermo.hpp"

namespace spatent {

/// Weights of rho(2) over the pair states |psi_kl>, k >= l.
struct TwoBosonMixture {
  std::vector<double> occupations;
  double normalization = 0.0;  // M

  [[nodiscard]] int k_max() const noexcept { return static_cast<int>(occupations.size()); }
  [[nodiscard]] double diagonal_weight(int k) const {
    const double n = occupations.at(static_cast<std::size_t>(k));
    return normalization > 0.0 ? 2.0 * n * n / normalization : 0.0;
  }
  [[nodiscard]] double pair_weight(int k, int l) const {
    if (k == l) return diagonal_weight(k);
    return normalization > 0.0 ? occupations.at(static_cast<std::size_t>(k)) *
                                     occupations.at(static_cast<std::size_t>(l)) / normalization
                               : 0.0;
  }
  [[nodiscard]] double weight_sum() const {
    double s = 0.0;
    for (int k = 0; k < k_max(); ++k) {
      s += diagonal_weight(k);
      for (int l = 0; l < k; ++l) s += pair_weight(k, l);
    }
    return s;
  }
};

/// M over the given occupations; <N> is their sum, so the weights sum to one.
inline double pair_normalization(std::span<const double> occupations) {
  double sum = 0.0, sum_sq = 0.0;
  for (double n : occupations) {
    if (!(n >= 0.0)) throw std::domain_error("occupations must be non-negative");
    sum += n;
    sum_sq += n * n;
  }
  return 0.5 * (3.0 * sum_sq + sum * sum);
}

inline TwoBosonMixture mixture_weights(std::span<const double> occupations) {
  TwoBosonMixture m;
  m.occupations.assign(occupations.begin(), occupations.end());
  m.normalization = pair_normalization(occupations);
  return m;
}

inline TwoBosonMixture mixture_weights(const ThermalState& thermal) {
  return mixture_weights(thermal.occupations);
}

namespace detail {

inline Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

inline void check_table(std::span<const double> occupations, const OverlapTable& table) {
  if (static_cast<int>(occupations.size()) > table.size())
    throw std::invalid_argument("overlap table smaller than the occupation table");
}

inline void require_symmetric(const OverlapTable& table) {
  if (!table.split().symmetric())
    throw std::invalid_argument("the closed triple sum assumes the symmetric split a = 0");
}

}  // namespace detail

/// |M chi|^2 for the coherent-bunching block of rho(2)^{T_B}; any split.
inline double coherent_bunching_norm_squared(std::span<const double> occupations,
                                             const OverlapTable& table) {
  detail::check_table(occupations, table);
  const auto K = static_cast<Eigen::Index>(occupations.size());
  if (K == 0) return 0.0;
  const auto n = detail::as_vector(occupations);
  const Eigen::MatrixXd ga = table.gram_a().topLeftCorner(K, K);
  const Eigen::MatrixXd gb = table.gram_b().topLeftCorner(K, K);
  const Eigen::MatrixXd p = ga.cwiseProduct(gb);
  const Eigen::VectorXd pn = p * n;
  const Eigen::VectorXd n2 = n.cwiseAbs2();

  // tr((D gA D gB)^2) with D = diag(n).
  const Eigen::MatrixXd left = n.asDiagonal() * ga * n.asDiagonal();
  Eigen::MatrixXd y(K, K);
  y.noalias() = left * gb;
  const double trace_y2 = y.cwiseProduct(y.transpose()).sum();

  const double npn = n.dot(pn);
  const double uu = 2.0 * npn * npn + 2.0 * trace_y2;
  const double us = 4.0 * n2.dot(pn.cwiseAbs2());
  const double ss = 4.0 * (n2.transpose() * p.cwiseAbs2() * n2).value();
  return 0.25 * (uu + 2.0 * us + ss);
}

/// Closed triple sum for <chi|chi> (symmetric split only):
///   1/4 sum_{k,l} n_k^2 n_l^2 O_kl^4
/// + sum_{k>l} sum_{k'>l'} n_k n_l n_k' n_l' O_kk'^2 O_ll'^2 p_AA(kl) p_AA(k'l')
/// + sum_{k'>l'} sum_k n_k^2 n_k' n_l' O_kk'^2 O_kl'^2 p_AA(k'l').
/// The double pair sum is evaluated as sum((Q X) .* (X Q)) with Q = O.^2 and
/// X the strictly lower-triangular matrix of n_k n_l p_AA(kl).
inline double chi_norm_squared(std::span<const double> occupations, const OverlapTable& table) {
  detail::check_table(occupations, table);
  detail::require_symmetric(table);
  const auto K = static_cast<Eigen::Index>(occupations.size());
  if (K == 0) return 0.0;
  const auto n = detail::as_vector(occupations);
  const Eigen::MatrixXd q = table.truncated(static_cast<int>(K)).overlap_matrix().cwiseAbs2();
  const Eigen::VectorXd n2 = n.cwiseAbs2();

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index l = 0; l < k; ++l)
      x(k, l) = n(k) * n(l) * table.p_a(static_cast<int>(k)) * table.p_a(static_cast<int>(l)) *
                (1.0 + q(k, l));

  const double t1 = 0.25 * (n2.transpose() * q.cwiseAbs2() * n2).value();
  Eigen::MatrixXd qx(K, K), xq(K, K);
  qx.noalias() = q * x;
  xq.noalias() = x * q;
  const double t2 = qx.cwiseProduct(xq).sum();
  // sum_k n_k^2 (Q X Q)_kk
  const double t3 = n2.dot(qx.cwiseProduct(q.transpose()).rowwise().sum());
  return t1 + t2 + t3;
}

/// Term-by-term O(K^4) evaluation of chi_norm_squared.
inline double chi_norm_squared_direct(std::span<const double> occupations,
                                      const OverlapTable& table) {
  detail::check_table(occupations, table);
  detail::require_symmetric(table);
  const int K = static_cast<int>(occupations.size());
  const auto n = [&](int k) { return occupations[static_cast<std::size_t>(k)]; };
  const auto o = [&](int k, int l) { return table.overlap(k, l); };
  const auto p_aa = [&](int k, int l) { return table.p_a(k) * table.p_a(l) * (1.0 + std::pow(o(k, l), 2)); };
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) t1 += 0.25 * n(k) * n(k) * n(l) * n(l) * std::pow(o(k, l), 4);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < k; ++l)
      for (int kp = 0; kp < K; ++kp)
        for (int lp = 0; lp < kp; ++lp)
          t2 += n(k) * n(l) * n(kp) * n(lp) * std::pow(o(k, kp), 2) * std::pow(o(l, lp), 2) *
                p_aa(k, l) * p_aa(kp, lp);
  for (int kp = 0; kp < K; ++kp)
    for (int lp = 0; lp < kp; ++lp)
      for (int k = 0; k < K; ++k)
        t3 += n(k) * n(k) * n(kp) * n(lp) * std::pow(o(k, kp), 2) * std::pow(o(k, lp), 2) *
              p_aa(kp, lp);
  return t1 + t2 + t3;
}

enum class LambdaFormula { coherent_bunching, printed_sum };

inline const char* to_string(LambdaFormula f) noexcept {
  return f == LambdaFormula::coherent_bunching ? "coherent_bunching" : "printed_sum";
}

/// Lower bound on the negativity of rho(2) and the quantities behind it.
struct NegativityReport {
  double T = 0.0;
  double mu = 0.0;
  double n_mean = 0.0;
  int k_max = 0;
  double normalization = 0.0;  // M
  double lambda = 0.0;         // |chi| / M from the coherent-bunching block
  double chi_norm_sq = 0.0;    // <chi|chi> (M^2 included) for lambda
  /// From the closed triple sum; NaN when the split is not symmetric.
  double lambda_printed = std::numeric_limits<double>::quiet_NaN();
  double chi_norm_sq_printed = std::numeric_limits<double>::quiet_NaN();
  double condensate_fraction = 0.0;
  double tail_bound = 0.0;
  /// First-order effect of the omitted tail occupations on lambda.
  double truncation_error_estimate = 0.0;
  std::optional<double> oracle_negativity;

  [[nodiscard]] double lambda_for(LambdaFormula f) const noexcept {
    return f == LambdaFormula::coherent_bunching ? lambda : lambda_printed;
  }
  [[nodiscard]] double chi_norm_sq_for(LambdaFormula f) const noexcept {
    return f == LambdaFormula::coherent_bunching ? chi_norm_sq : chi_norm_sq_printed;
  }
  [[nodiscard]] std::optional<double> gap() const {
    if (!oracle_negativity) return std::nullopt;
    return *oracle_negativity - lambda;
  }
};

/// lambda from a solved state and a matching overlap table.
inline NegativityReport lambda_lower_bound(const ThermalState& thermal, const OverlapTable& table,
                                           bool with_printed = true) {
  NegativityReport r;
  r.T = thermal.T;
  r.mu = thermal.mu;
  r.n_mean = thermal.n_mean;
  r.k_max = thermal.k_max;
  r.tail_bound = thermal.tail_bound;
  r.condensate_fraction = thermal.condensate_fraction();
  r.normalization = pair_normalization(thermal.occupations);
  if (r.normalization <= 0.0) return r;

  r.chi_norm_sq = coherent_bunching_norm_squared(thermal.occupations, table);
  r.lambda = std::sqrt(r.chi_norm_sq) / r.normalization;
  if (with_printed && table.split().symmetric()) {
    r.chi_norm_sq_printed = chi_norm_squared(thermal.occupations, table);
    r.lambda_printed = std::sqrt(r.chi_norm_sq_printed) / r.normalization;
  }
  // lambda is homogeneous of degree zero in the occupations; dropping a tail
  // of mass t out of N moves it by at most ~4 t/N relative.
  const double retained = thermal.retained_number();
  r.truncation_error_estimate = retained > 0.0 ? 4.0 * r.lambda * r.tail_bound / retained : 0.0;
  return r;
}

/// Full pipeline: solve mu, choose K_max for tail budget eps, build the
/// overlap table and evaluate lambda.
inline NegativityReport lambda_lower_bound(double T, double n_target, double eps = 1e-8,
                                           const RegionSplit& split = {},
                                           bool with_printed = true) {
  if (!(T > 0.0)) throw std::domain_error("temperature must be positive");
  const ThermalState thermal = make_thermal_state(T, n_target, eps);
  const OverlapTable table = OverlapTable::closed_form(thermal.k_max, split);
  return lambda_lower_bound(thermal, table, with_printed);
}

/// Entropy in bits of a probability vector; zero entries contribute nothing.
template <typename Range>
double shannon_entropy_bits(const Range& probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

/// von Neumann entropy in bits of a real symmetric density matrix.
inline double von_neumann_entropy_bits(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  std::vector<double> w(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  for (double& x : w) x = std::max(x, 0.0);
  return shannon_entropy_bits(w);
}

/// Entanglement entropy (bits) between A and B of the pure pair |psi_kl>.
inline double pure_pair_entropy(int k, int l, const OverlapTable& table) {
  if (k < 0 || l < 0) throw std::invalid_argument("mode index must be non-negative");
  if (k == l) {
    const double pa = table.p_a(k), pb = table.p_b(k);
    const double probs[] = {pa * pa, pb * pb, 2.0 * pa * pb};
    return shannon_entropy_bits(probs);
  }
  const int modes[] = {k, l};
  const RegionBases bases = make_region_bases(table, modes);
  const Eigen::MatrixXd psi = pair_state(bases, 0, 1);
  return von_neumann_entropy_bits(psi * psi.transpose());
}

inline double pure_pair_entropy(int k, int l, const RegionSplit& split) {
  return pure_pair_entropy(k, l, OverlapTable::closed_form(std::max(k, l) + 1, split));
}

struct SplitEntropy {
  double a = 0.0;
  double entropy = 0.0;
};

/// Entropy of |psi_kk> for each split point in the grid.
inline std::vector<SplitEntropy> split_scan_entropy(int k, std::span<const double> a_grid) {
  std::vector<SplitEntropy> out;
  out.reserve(a_grid.size());
  for (double a : a_grid) out.push_back({a, pure_pair_entropy(k, k, RegionSplit{a})});
  return out;
}

}  // namespace spatent
