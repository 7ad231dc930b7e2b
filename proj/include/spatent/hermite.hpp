#pragma once

// Harmonic-oscillator eigenfunctions in natural units (hbar = m = omega = 1).
//
//   phi_k(x) = (2^k k! sqrt(pi))^(-1/2) H_k(x) exp(-x^2/2)
//
// evaluated through the normalized three-term recurrence
//
//   phi_{k+1} = x sqrt(2/(k+1)) phi_k - sqrt(k/(k+1)) phi_{k-1}
//
// Raw H_k is never formed. The Gaussian envelope is carried as a separate
// log-scale exponent that absorbs periodic rescalings of the recurrence, so
// the result only underflows when the true value is below the smallest
// representable number.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatent {

/// Largest supported mode index.
inline constexpr int max_mode_index = 10000;

/// Single-particle eigenmode of the trap. The energy is E_k = k; the
/// zero-point offset is absorbed into the chemical potential.
struct EigenMode {
  int k = 0;

  [[nodiscard]] constexpr double energy() const noexcept { return static_cast<double>(k); }
};

namespace detail {

inline void check_mode(int k) {
  if (k < 0 || k > max_mode_index)
    throw std::out_of_range("mode index " + std::to_string(k) + " outside [0, " +
                            std::to_string(max_mode_index) + "]");
}

template <typename Real>
inline constexpr Real rescale_threshold = Real(1e120);

}  // namespace detail

/// Fills out[0..kmax] with phi_0(x) .. phi_kmax(x). One recurrence pass.
template <typename Real>
void eval_eigenfunctions(int kmax, Real x, std::span<Real> out) {
  using std::exp;
  using std::log;
  using std::sqrt;
  detail::check_mode(kmax);
  if (out.size() < static_cast<std::size_t>(kmax) + 1)
    throw std::invalid_argument("eval_eigenfunctions: output span too short");
  if (!std::isfinite(static_cast<double>(x)))
    throw std::invalid_argument("eval_eigenfunctions: non-finite position");

  const Real pi_quarter = Real(1) / sqrt(sqrt(std::numbers::pi_v<Real>));
  const Real step = log(detail::rescale_threshold<Real>);
  // Stored values omit the factor exp(-x^2/2 + m * step), where m counts the
  // renormalizations made before the value was written. rescaled_at[m] is
  // the first index written after the m-th renormalization.
  std::vector<int> rescaled_at;
  Real prev = 0;
  Real cur = pi_quarter;
  out[0] = cur;
  for (int k = 0; k < kmax; ++k) {
    const Real next = x * sqrt(Real(2) / Real(k + 1)) * cur - sqrt(Real(k) / Real(k + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > detail::rescale_threshold<Real>) {
      prev /= detail::rescale_threshold<Real>;
      cur /= detail::rescale_threshold<Real>;
      rescaled_at.push_back(k + 1);
    }
    out[static_cast<std::size_t>(k) + 1] = cur;
  }
  const Real gaussian_exponent = -x * x / 2;
  std::size_t m = 0;
  for (int k = 0; k <= kmax; ++k) {
    while (m < rescaled_at.size() && rescaled_at[m] <= k) ++m;
    const auto i = static_cast<std::size_t>(k);
    if (out[i] == Real(0)) continue;
    const Real magnitude = exp(gaussian_exponent + Real(m) * step + log(std::abs(out[i])));
    out[i] = out[i] < 0 ? -magnitude : magnitude;
  }
}

/// phi_0(x) .. phi_kmax(x) as a vector.
template <typename Real = double>
[[nodiscard]] std::vector<Real> eigenfunction_table(int kmax, Real x) {
  std::vector<Real> v(static_cast<std::size_t>(kmax) + 1);
  eval_eigenfunctions<Real>(kmax, x, v);
  return v;
}

/// phi_k(x).
template <typename Real = double>
[[nodiscard]] Real eval_eigenfunction(int k, Real x) {
  detail::check_mode(k);
  return eigenfunction_table<Real>(k, x)[static_cast<std::size_t>(k)];
}

template <typename Real = double>
[[nodiscard]] Real eval_eigenfunction(EigenMode mode, Real x) {
  return eval_eigenfunction<Real>(mode.k, x);
}

/// Values and first derivatives of phi_0 .. phi_kmax at x, using the ladder
/// identity phi_k' = sqrt(k/2) phi_{k-1} - sqrt((k+1)/2) phi_{k+1}.
template <typename Real = double>
struct EigenfunctionJet {
  std::vector<Real> value;
  std::vector<Real> derivative;
};

template <typename Real = double>
[[nodiscard]] EigenfunctionJet<Real> eigenfunction_jet(int kmax, Real x) {
  using std::sqrt;
  detail::check_mode(kmax + 1);
  std::vector<Real> ext(static_cast<std::size_t>(kmax) + 2);
  eval_eigenfunctions<Real>(kmax + 1, x, ext);
  EigenfunctionJet<Real> jet;
  jet.value.assign(ext.begin(), ext.begin() + kmax + 1);
  jet.derivative.resize(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const Real down = k > 0 ? sqrt(Real(k) / 2) * ext[i - 1] : Real(0);
    jet.derivative[i] = down - sqrt(Real(k + 1) / 2) * ext[i + 1];
  }
  return jet;
}

}  // namespace spatent
