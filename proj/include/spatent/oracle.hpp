#pragma once

// Brute-force reference for small truncations: rho(2) written out as a dense
// matrix on the orthonormal product basis of the A and B sectors, its
// partial transpose, exact negativity, and the coherent-bunching block.
//
// The oracle builds its own overlap table by quadrature, so the certificates
// compare two independent routes to the same numbers.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "spatent/entanglement.hpp"
#include "spatent/fock_basis.hpp"
#include "spatent/regions.hpp"
#include "spatent/thermo.hpp"

namespace spatent {

/// Largest number of trap modes the oracle accepts.
inline constexpr int oracle_max_modes = 6;

/// rho(2) on the A (x) B sector basis. Row/column index a * dim_b + b.
struct PairDensityMatrix {
  RegionBases bases;
  Eigen::MatrixXd matrix;

  [[nodiscard]] int dim_a() const noexcept { return bases.dim_a(); }
  [[nodiscard]] int dim_b() const noexcept { return bases.dim_b(); }
  [[nodiscard]] Eigen::Index index(int a, int b) const noexcept {
    return static_cast<Eigen::Index>(a) * dim_b() + b;
  }
};

namespace detail {

inline Eigen::VectorXd flatten(const Eigen::MatrixXd& psi) {
  // Row-major flattening so that (a, b) -> a * dim_b + b.
  Eigen::VectorXd v(psi.size());
  for (Eigen::Index a = 0; a < psi.rows(); ++a)
    for (Eigen::Index b = 0; b < psi.cols(); ++b) v(a * psi.cols() + b) = psi(a, b);
  return v;
}

inline void check_oracle_size(std::size_t K) {
  if (K == 0 || K > static_cast<std::size_t>(oracle_max_modes))
    throw std::invalid_argument("oracle truncation must lie in [1, " +
                                std::to_string(oracle_max_modes) + "]");
}

}  // namespace detail

/// rho(2) restricted to modes 0 .. K-1 (K = occupations.size()), with the
/// weights normalized over the retained modes.
inline PairDensityMatrix build_rho2_matrix(std::span<const double> occupations,
                                           const OverlapTable& table) {
  detail::check_oracle_size(occupations.size());
  const int K = static_cast<int>(occupations.size());
  if (K > table.size()) throw std::invalid_argument("overlap table smaller than truncation");
  const TwoBosonMixture mix = mixture_weights(occupations);
  if (!(mix.normalization > 0.0)) throw std::domain_error("rho(2) needs a non-empty trap");

  RegionBases bases = make_region_bases(table, K);
  if (bases.a.rank() < K || bases.b.rank() < K)
    throw std::runtime_error("region Gram matrix is rank deficient (rank " +
                             std::to_string(bases.a.rank()) + "/" + std::to_string(bases.b.rank()) +
                             " of " + std::to_string(K) + ")");
  const Eigen::Index dim = static_cast<Eigen::Index>(bases.dim_a()) * bases.dim_b();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double w = mix.pair_weight(k, l);
      if (w == 0.0) continue;
      const Eigen::VectorXd v = detail::flatten(pair_state(bases, k, l));
      rho.noalias() += w * v * v.transpose();
    }
  }
  const double trace = rho.trace();
  if (std::abs(trace - 1.0) > 1e-8)
    throw std::runtime_error("rho(2) trace deviates from one: " + std::to_string(trace));
  return {std::move(bases), std::move(rho)};
}

/// Oracle entry point: occupations of modes < K at the solved (T, mu) and a
/// quadrature overlap table for the split.
inline PairDensityMatrix build_rho2_matrix(const ThermalState& thermal, const RegionSplit& split,
                                           int K) {
  detail::check_oracle_size(static_cast<std::size_t>(K));
  const ThermalState restricted = thermal_state_at(thermal.T, thermal.mu, thermal.n_mean, K);
  return build_rho2_matrix(restricted.occupations, OverlapTable::quadrature(K, split));
}

/// Transposes the B factor: (a b),(a' b') -> (a b'),(a' b).
inline Eigen::MatrixXd partial_transpose_b(const Eigen::MatrixXd& rho, int dim_a, int dim_b) {
  const Eigen::Index db = dim_b;
  if (rho.rows() != rho.cols() || rho.rows() != static_cast<Eigen::Index>(dim_a) * db)
    throw std::invalid_argument("partial_transpose_b: dimension mismatch");
  Eigen::MatrixXd out(rho.rows(), rho.cols());
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index b = 0; b < db; ++b)
      for (Eigen::Index ap = 0; ap < dim_a; ++ap)
        for (Eigen::Index bp = 0; bp < db; ++bp)
          out(a * db + b, ap * db + bp) = rho(a * db + bp, ap * db + b);
  return out;
}

inline Eigen::MatrixXd partial_transpose_b(const PairDensityMatrix& rho) {
  return partial_transpose_b(rho.matrix, rho.dim_a(), rho.dim_b());
}

/// Reduced state of region A.
inline Eigen::MatrixXd partial_trace_b(const Eigen::MatrixXd& rho, int dim_a, int dim_b) {
  const Eigen::Index db = dim_b;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim_a, dim_a);
  for (Eigen::Index a = 0; a < dim_a; ++a)
    for (Eigen::Index ap = 0; ap < dim_a; ++ap)
      for (Eigen::Index b = 0; b < db; ++b) out(a, ap) += rho(a * db + b, ap * db + b);
  return out;
}

/// Sum of |negative eigenvalues| of a symmetric matrix.
inline double negative_part(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < 0.0) s -= es.eigenvalues()(i);
  return s;
}

inline double exact_negativity(const Eigen::MatrixXd& rho, int dim_a, int dim_b) {
  return negative_part(partial_transpose_b(rho, dim_a, dim_b));
}

inline double exact_negativity(const PairDensityMatrix& rho) {
  return negative_part(partial_transpose_b(rho));
}

/// Which vector spans the coherent-bunching block.
///  * bunching_weighted: the block as it sits in rho(2)^{T_B}; pair terms
///    carry sqrt(p_AA p_BB).
///  * as_displayed: the same expansion with unit-norm pair kets and bare
///    occupation products (n_k^2 / 2 and n_k n_l) as coefficients.
enum class ChiVariant { bunching_weighted, as_displayed };

/// |smallest eigenvalue| of the block spanned by |0>_A|0>_B and the sector
/// with two bosons in each region.
inline double rank2_part_eigenvalue(const PairDensityMatrix& rho,
                                    ChiVariant variant = ChiVariant::bunching_weighted,
                                    std::span<const double> occupations = {}) {
  const SectorBasis& sa = rho.bases.sectors_a;
  const SectorBasis& sb = rho.bases.sectors_b;
  const int pa = sa.pair_count(), pb = sb.pair_count();
  const Eigen::Index block = 1 + static_cast<Eigen::Index>(pa) * pb;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block, block);

  if (variant == ChiVariant::bunching_weighted) {
    const Eigen::MatrixXd pt = partial_transpose_b(rho);
    std::vector<Eigen::Index> rows{rho.index(0, 0)};
    for (int i = 0; i < pa; ++i)
      for (int j = 0; j < pb; ++j) rows.push_back(rho.index(sa.first_pair() + i, sb.first_pair() + j));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows.size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = pt(rows[r], rows[c]);
  } else {
    const int K = static_cast<int>(occupations.size());
    if (K != static_cast<int>(rho.bases.modes.size()))
      throw std::invalid_argument("as_displayed needs the occupations used for rho");
    const double M = pair_normalization(occupations);
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(block - 1);
    for (int k = 0; k < K; ++k) {
      for (int l = 0; l <= k; ++l) {
        const Eigen::MatrixXd psi = pair_state(rho.bases, k, l);
        Eigen::VectorXd alpha = psi.col(0).segment(sa.first_pair(), pa);
        Eigen::VectorXd beta = psi.row(0).segment(sb.first_pair(), pb).transpose();
        if (alpha.norm() == 0.0 || beta.norm() == 0.0) continue;
        alpha.normalize();
        beta.normalize();
        const double nk = occupations[static_cast<std::size_t>(k)];
        const double nl = occupations[static_cast<std::size_t>(l)];
        const double c = (k == l ? 0.5 * nk * nk : nk * nl) / M;
        for (int i = 0; i < pa; ++i)
          for (int j = 0; j < pb; ++j) chi(static_cast<Eigen::Index>(i) * pb + j) += c * alpha(i) * beta(j);
      }
    }
    m.block(1, 0, block - 1, 1) = chi;
    m.block(0, 1, 1, block - 1) = chi.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  return std::max(0.0, -es.eigenvalues().minCoeff());
}

/// Convenience: oracle rank-2 eigenvalue for occupations and a table.
inline double rank2_part_eigenvalue(std::span<const double> occupations, const OverlapTable& table,
                                    ChiVariant variant = ChiVariant::bunching_weighted) {
  double total = 0.0;
  for (double n : occupations) total += n;
  if (total == 0.0) return 0.0;
  const PairDensityMatrix rho = build_rho2_matrix(occupations, table);
  return rank2_part_eigenvalue(rho, variant, occupations);
}

// ---------------------------------------------------------------------------
// Verification report

struct VerifyGrid {
  std::vector<double> temperatures{0.05, 0.3, 1.0, 3.0, 10.0};
  std::vector<double> n_values{1.0, 10.0, 100.0};
  std::vector<int> k_values{3};
  RegionSplit split{};
  /// Test hook: scales the off-diagonal entries of the overlap table fed to
  /// the analytic route. 1 leaves it untouched.
  double overlap_corruption = 1.0;
};

struct CertificateCheck {
  std::string name;
  double T = 0.0;
  double n_mean = 0.0;
  int K = 0;
  std::map<std::string, double> values;
  bool passed = false;
  bool informational = false;
  std::string message;
};

struct VerificationReport {
  std::vector<CertificateCheck> checks;

  [[nodiscard]] bool all_passed() const {
    for (const auto& c : checks)
      if (!c.informational && !c.passed) return false;
    return true;
  }
  [[nodiscard]] std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks)
      if (!c.informational && !c.passed) ++n;
    return n;
  }
  [[nodiscard]] bool has_failure(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name && !c.informational && !c.passed) return true;
    return false;
  }

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["passed"] = all_passed();
    j["failures"] = failures();
    auto& arr = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json e{{"name", c.name}, {"T", c.T}, {"n_mean", c.n_mean}, {"K", c.K},
                       {"passed", c.passed}, {"informational", c.informational}};
      nlohmann::json vals = nlohmann::json::object();
      for (const auto& [key, v] : c.values) {
        if (std::isfinite(v)) vals[key] = v; else vals[key] = nullptr;
      }
      e["values"] = std::move(vals);
      if (!c.message.empty()) e["message"] = c.message;
      arr.push_back(std::move(e));
    }
    return j;
  }
};

namespace verify_tol {
inline constexpr double trace = 1e-10;
inline constexpr double positivity = 1e-12;
inline constexpr double lower_bound = 1e-9;
inline constexpr double block_match_rel = 1e-10;
}  // namespace verify_tol

/// Runs every oracle certificate over the grid.
inline VerificationReport run_verification(const VerifyGrid& grid) {
  VerificationReport report;
  for (int K : grid.k_values) detail::check_oracle_size(static_cast<std::size_t>(K));

  for (double T : grid.temperatures) {
    for (double N : grid.n_values) {
      for (int K : grid.k_values) {
        const auto make = [&](std::string name) {
          CertificateCheck c;
          c.name = std::move(name);
          c.T = T;
          c.n_mean = N;
          c.K = K;
          return c;
        };
        try {
          const double mu = solve_chemical_potential(T, N);
          const ThermalState st = thermal_state_at(T, mu, N, K);
          const OverlapTable oracle_table = OverlapTable::quadrature(K, grid.split);
          const PairDensityMatrix rho = build_rho2_matrix(st.occupations, oracle_table);

          const double trace = rho.matrix.trace();
          auto c_trace = make("trace");
          c_trace.values = {{"trace", trace}};
          c_trace.passed = std::abs(trace - 1.0) <= verify_tol::trace;
          report.checks.push_back(c_trace);

          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.matrix, Eigen::EigenvaluesOnly);
          auto c_pos = make("positivity");
          c_pos.values = {{"min_eigenvalue", es.eigenvalues().minCoeff()}};
          c_pos.passed = es.eigenvalues().minCoeff() >= -verify_tol::positivity;
          report.checks.push_back(c_pos);

          const double negativity = exact_negativity(rho);
          const double block = rank2_part_eigenvalue(rho, ChiVariant::bunching_weighted);
          auto c_lb = make("lower_bound");
          c_lb.values = {{"exact_negativity", negativity}, {"rank2_eigenvalue", block},
                         {"gap", negativity - block}};
          c_lb.passed = negativity >= block - verify_tol::lower_bound;
          report.checks.push_back(c_lb);

          // Analytic route on its own (closed-form) table.
          OverlapTable analytic_table = OverlapTable::closed_form(K, grid.split);
          if (grid.overlap_corruption != 1.0)
            analytic_table = analytic_table.with_corrupted_overlaps(grid.overlap_corruption);
          const double M = pair_normalization(st.occupations);
          const double lambda =
              std::sqrt(coherent_bunching_norm_squared(st.occupations, analytic_table)) / M;

          auto c_match = make("analytic_block_match");
          const double rel = std::abs(lambda - block) / std::max(block, 1e-300);
          c_match.values = {{"lambda", lambda}, {"rank2_eigenvalue", block}, {"relative_difference", rel}};
          c_match.passed = rel <= verify_tol::block_match_rel;
          report.checks.push_back(c_match);

          auto c_alb = make("analytic_lower_bound");
          c_alb.values = {{"exact_negativity", negativity}, {"lambda", lambda}};
          c_alb.passed = negativity >= lambda - verify_tol::lower_bound;
          report.checks.push_back(c_alb);

          if (grid.split.symmetric()) {
            auto c_printed = make("printed_sum_comparison");
            c_printed.informational = true;
            const double printed = std::sqrt(chi_norm_squared(st.occupations, analytic_table)) / M;
            const double displayed = rank2_part_eigenvalue(rho, ChiVariant::as_displayed, st.occupations);
            c_printed.values = {{"lambda_printed", printed},
                                {"rank2_eigenvalue", block},
                                {"rank2_eigenvalue_as_displayed", displayed},
                                {"relative_difference", std::abs(printed - block) / std::max(block, 1e-300)}};
            c_printed.passed = std::abs(printed - block) <= verify_tol::block_match_rel * block;
            report.checks.push_back(c_printed);
          }
        } catch (const std::exception& e) {
          auto c = make("evaluation");
          c.passed = false;
          c.message = e.what();
          report.checks.push_back(c);
        }
      }
    }
  }
  return report;
}

}  // namespace spatent
