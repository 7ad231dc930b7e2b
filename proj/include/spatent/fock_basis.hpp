#pragma once

// Orthonormal bases for the particle-number sectors of one region.
//
// The region-restricted states f_k = phi_k chi_R are not orthogonal. Their
// Gram matrix G_kl = <f_k|f_l> is diagonalized and the span is given an
// orthonormal basis e_i = sum_k L_ki f_k (symmetric/Lowdin when G has full
// rank, canonical on the retained eigenvectors otherwise). In that basis
// f_k = sum_i C_ki e_i with C = G L, and the region's Fock space truncated to
// at most two particles has the orthonormal basis
//
//   |0>,  a_i^+|0>,  a_i^+ a_j^+|0> (i < j),  (a_i^+)^2 / sqrt(2) |0>.
//
// The bipartite space is the tensor product of the A and B sector bases, so
// partial transposition is an index swap.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spatent/regions.hpp"

namespace spatent {

/// Orthonormalization of a set of non-orthogonal region-restricted states.
class GramBasis {
 public:
  static constexpr double default_rank_cutoff = 1e-12;

  explicit GramBasis(const Eigen::MatrixXd& gram, double rank_cutoff = default_rank_cutoff)
      : gram_(gram) {
    if (gram.rows() != gram.cols()) throw std::invalid_argument("Gram matrix must be square");
    const Eigen::Index n = gram.rows();
    if (n == 0) {
      transform_.resize(0, 0);
      coefficients_.resize(0, 0);
      return;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw std::runtime_error("Gram eigensolver failed");
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    if (w.minCoeff() < -1e3 * rank_cutoff - 1e-10)
      throw std::domain_error("Gram matrix is not positive semidefinite");

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < n; ++i)
      if (w(i) > rank_cutoff) kept.push_back(i);
    rank_ = static_cast<int>(kept.size());

    Eigen::MatrixXd vr(n, rank_);
    Eigen::VectorXd inv_sqrt(rank_);
    for (int j = 0; j < rank_; ++j) {
      vr.col(j) = v.col(kept[static_cast<std::size_t>(j)]);
      inv_sqrt(j) = 1.0 / std::sqrt(w(kept[static_cast<std::size_t>(j)]));
    }
    if (rank_ == n) {
      transform_ = vr * inv_sqrt.asDiagonal() * vr.transpose();  // G^{-1/2}
    } else {
      transform_ = vr * inv_sqrt.asDiagonal();
    }
    coefficients_ = gram_ * transform_;
  }

  [[nodiscard]] int size() const noexcept { return static_cast<int>(gram_.rows()); }
  [[nodiscard]] int rank() const noexcept { return rank_; }
  [[nodiscard]] const Eigen::MatrixXd& gram() const noexcept { return gram_; }
  /// L: columns are the orthonormal basis vectors in terms of f_k.
  [[nodiscard]] const Eigen::MatrixXd& transform() const noexcept { return transform_; }
  /// C: row k expands f_k in the orthonormal basis.
  [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd transform_;
  Eigen::MatrixXd coefficients_;
  int rank_ = 0;
};

/// Index map for the 0-, 1- and 2-particle sectors over r orthonormal modes.
class SectorBasis {
 public:
  explicit SectorBasis(int modes) : modes_(modes) {
    if (modes < 0) throw std::invalid_argument("negative mode count");
  }

  [[nodiscard]] int modes() const noexcept { return modes_; }
  [[nodiscard]] int dimension() const noexcept { return 1 + modes_ + pair_count(); }
  [[nodiscard]] int pair_count() const noexcept { return modes_ * (modes_ + 1) / 2; }
  [[nodiscard]] int sector_dimension(int particles) const {
    switch (particles) {
      case 0: return 1;
      case 1: return modes_;
      case 2: return pair_count();
      default: throw std::invalid_argument("sectors hold at most two particles");
    }
  }

  [[nodiscard]] static constexpr int vacuum() noexcept { return 0; }
  [[nodiscard]] int single(int i) const noexcept { return 1 + i; }
  /// a_i^+ a_j^+ |0> for i < j, (a_i^+)^2/sqrt(2) |0> for i == j.
  [[nodiscard]] int pair(int i, int j) const noexcept {
    if (i > j) std::swap(i, j);
    // Row-major upper triangle including the diagonal.
    return 1 + modes_ + i * modes_ - i * (i - 1) / 2 + (j - i);
  }
  [[nodiscard]] int first_pair() const noexcept { return 1 + modes_; }
  [[nodiscard]] int particles(int index) const noexcept {
    return index == 0 ? 0 : (index <= modes_ ? 1 : 2);
  }

 private:
  int modes_;
};

/// Orthonormal bases for regions A and B over a chosen list of trap modes.
struct RegionBases {
  std::vector<int> modes;
  GramBasis a;
  GramBasis b;
  SectorBasis sectors_a;
  SectorBasis sectors_b;

  [[nodiscard]] int dim_a() const noexcept { return sectors_a.dimension(); }
  [[nodiscard]] int dim_b() const noexcept { return sectors_b.dimension(); }
};

inline RegionBases make_region_bases(const OverlapTable& table, std::span<const int> modes,
                                     double rank_cutoff = GramBasis::default_rank_cutoff) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  const Eigen::MatrixXd gram_b_full = table.gram_b();
  Eigen::MatrixXd ga(n, n), gb(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int k = modes[static_cast<std::size_t>(i)];
      const int l = modes[static_cast<std::size_t>(j)];
      if (k < 0 || l < 0 || k >= table.size() || l >= table.size())
        throw std::out_of_range("mode outside the overlap table");
      ga(i, j) = table.gram_a()(k, l);
      gb(i, j) = gram_b_full(k, l);
    }
  }
  GramBasis a(ga, rank_cutoff);
  GramBasis b(gb, rank_cutoff);
  const int ra = a.rank();
  const int rb = b.rank();
  return RegionBases{std::vector<int>(modes.begin(), modes.end()), std::move(a), std::move(b),
                     SectorBasis(ra), SectorBasis(rb)};
}

/// Modes 0 .. K-1 of the table.
inline RegionBases make_region_bases(const OverlapTable& table, int K,
                                     double rank_cutoff = GramBasis::default_rank_cutoff) {
  std::vector<int> modes(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) modes[static_cast<std::size_t>(k)] = k;
  return make_region_bases(table, modes, rank_cutoff);
}

namespace detail {

/// Coefficients of (sum_i f_i a_i^+)(sum_j g_j a_j^+)|0> in the 2-particle
/// sector, written into column/row `out` starting at sectors.first_pair().
template <typename Out>
void add_two_particle(const SectorBasis& sectors, const Eigen::RowVectorXd& f,
                      const Eigen::RowVectorXd& g, double scale, Out&& out) {
  const int r = sectors.modes();
  for (int i = 0; i < r; ++i) {
    out(sectors.pair(i, i)) += scale * std::sqrt(2.0) * f(i) * g(i);
    for (int j = i + 1; j < r; ++j) out(sectors.pair(i, j)) += scale * (f(i) * g(j) + f(j) * g(i));
  }
}

}  // namespace detail

/// Coefficient matrix Psi(a, b) of the normalized two-boson state |psi_kl>
/// (positions k, l in bases.modes) in the A (x) B sector basis.
inline Eigen::MatrixXd pair_state(const RegionBases& bases, int k, int l) {
  const Eigen::MatrixXd& ca = bases.a.coefficients();
  const Eigen::MatrixXd& cb = bases.b.coefficients();
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(bases.dim_a(), bases.dim_b());
  const double scale = k == l ? 1.0 / std::sqrt(2.0) : 1.0;

  const Eigen::RowVectorXd fa = ca.row(k), ga = ca.row(l);
  const Eigen::RowVectorXd fb = cb.row(k), gb = cb.row(l);
  auto col0 = psi.col(SectorBasis::vacuum());
  detail::add_two_particle(bases.sectors_a, fa, ga, scale, col0);
  auto row0 = psi.row(SectorBasis::vacuum());
  detail::add_two_particle(bases.sectors_b, fb, gb, scale, row0);
  for (int i = 0; i < bases.sectors_a.modes(); ++i)
    for (int j = 0; j < bases.sectors_b.modes(); ++j)
      psi(bases.sectors_a.single(i), bases.sectors_b.single(j)) +=
          scale * (fa(i) * gb(j) + ga(i) * fb(j));
  return psi;
}

}  // namespace spatent
