#pragma once

// Lossless multiparameter metrology with N00N-type probes.
//
// A d-parameter N00N family is
//   |ψ> = √(1 − dε²)|N,0,…,0> + ε Σ_j e^{iχ_j N^k} |0,…,N_(j),…,0>,
// and its accuracy is bounded by the quantum Cramér–Rao bound
// σ = √Tr(F⁻¹) with F the quantum Fisher information (QFI) matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "solnet/error.hpp"
#include "solnet/fock.hpp"
#include "solnet/linalg.hpp"
#include "solnet/semiclassical.hpp"

namespace solnet {

/// Integer power in floating point; exact for the occupation ranges used here.
inline double ipow(double base, int exponent) {
  double r = 1.0;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

/// d×d real symmetric Fisher information matrix.
class QfiMatrix {
 public:
  QfiMatrix() = default;
  explicit QfiMatrix(std::size_t d) : d_(d), data_(d * d, 0.0) {}

  std::size_t dim() const { return d_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * d_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
  std::span<const double> data() const { return data_; }

  double max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

  std::vector<double> eigenvalues() const {
    Matrix m(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) m(i, j) = (*this)(i, j);
    return symmetric_eigen(std::move(m), false).values;
  }

  /// Tr(F⁻¹) by Cholesky factorization and triangular solves.
  double trace_inverse() const { return trace_of_inverse_spd(data_, d_); }

 private:
  std::size_t d_ = 0;
  std::vector<double> data_;
};

struct NoonFamily {
  int d = 2;             // number of estimated phases
  double eps = 0.0;      // amplitude of each estimated channel
  int particles = 20;
  int k = 1;             // phase nonlinearity: φ_j = χ_j N^k
  std::vector<double> chi;  // true parameters, used when generating states

  void validate() const {
    if (d < 1) throw ConfigError("NoonFamily: d must be >= 1");
    if (k < 1) throw ConfigError("NoonFamily: k must be >= 1");
    if (particles < 1) throw ConfigError("NoonFamily: N must be >= 1");
    if (!(eps != 0.0 && eps * eps * d <= 1.0 + 1e-15)) throw ConfigError("NoonFamily: need 0 < eps^2 <= 1/d");
  }
};

/// Analytic QFI of the N00N family: F_ij = 4 N^{2k} ε² (δ_ij − ε²).
inline QfiMatrix qfi_noon_multi(const NoonFamily& fam) {
  fam.validate();
  const double nk = ipow(fam.particles, fam.k);
  const double e2 = fam.eps * fam.eps;
  QfiMatrix f(static_cast<std::size_t>(fam.d));
  for (int i = 0; i < fam.d; ++i)
    for (int j = 0; j < fam.d; ++j) f(i, j) = 4.0 * nk * nk * e2 * ((i == j ? 1.0 : 0.0) - e2);
  return f;
}

/// Amplitudes of the N00N family in the (d+1)-dimensional subspace spanned by
/// the edge kets; entry 0 is the reference mode.
inline std::vector<cplx> noon_family_amplitudes(const NoonFamily& fam, std::span<const double> chi) {
  if (chi.size() != static_cast<std::size_t>(fam.d)) throw ConfigError("noon_family_amplitudes: need d parameters");
  const double nk = ipow(fam.particles, fam.k);
  std::vector<cplx> a(static_cast<std::size_t>(fam.d) + 1);
  a[0] = std::sqrt(std::max(0.0, 1.0 - fam.d * fam.eps * fam.eps));
  for (int j = 0; j < fam.d; ++j) a[j + 1] = std::polar(fam.eps, chi[j] * nk);
  return a;
}

/// Overall accuracy bound σ = √Tr(F⁻¹).
inline double crb_overall(const QfiMatrix& f) { return std::sqrt(f.trace_inverse()); }

inline double ghl(int n, int k) { return 1.0 / ipow(n, k); }
inline double balanced_bound(int d, int n, int k) { return std::sqrt(d * (d + 1.0) / 2.0) / ipow(n, k); }
inline double optimized_bound(int d, int n, int k) {
  const double r = std::sqrt(static_cast<double>(d));
  return r * (r + 1.0) / (2.0 * ipow(n, k));
}
inline double optimized_eps(int d) { return 1.0 / std::sqrt(d + std::sqrt(static_cast<double>(d))); }

/// Phase super-sensitivity S = 1/(√(νN) σ_χ). Quantum-enhanced when S > 1;
/// bounded above by N^{k−1/2} at the generalized Heisenberg limit.
inline double sensitivity(double sigma_chi, int n, int trials = 1) {
  if (!(sigma_chi > 0.0)) throw ConfigError("sensitivity: sigma must be positive");
  if (trials < 1) throw ConfigError("sensitivity: trials must be >= 1");
  return 1.0 / (std::sqrt(static_cast<double>(trials) * n) * sigma_chi);
}

/// Pure-state QFI of the phase generators G_i = N_i^k, i ∈ {1, 2}:
/// F_ij = 4 (<G_i G_j> − <G_i><G_j>).
inline QfiMatrix qfi_pure_phase(const StateVector& psi, int k) {
  QfiMatrix f(2);
  double m1 = 0.0, m2 = 0.0, s11 = 0.0, s12 = 0.0, s22 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi[i]);
    const auto& s = psi.basis().state_of(i);
    const double g1 = ipow(s.n1, k), g2 = ipow(s.n2, k);
    m1 += p * g1;
    m2 += p * g2;
    s11 += p * g1 * g1;
    s12 += p * g1 * g2;
    s22 += p * g2 * g2;
  }
  f(0, 0) = 4.0 * (s11 - m1 * m1);
  f(0, 1) = f(1, 0) = 4.0 * (s12 - m1 * m2);
  f(1, 1) = 4.0 * (s22 - m2 * m2);
  return f;
}

struct FiniteDifference {
  double step = 1e-5;  // step in the parameter; scale with the phase rate for fast generators
  double norm_tolerance = 1e-10;
};

namespace detail {

template <class R>
std::vector<cplx> as_amplitudes(R&& r) {
  if constexpr (std::is_same_v<std::decay_t<R>, StateVector>) {
    return {r.amplitudes().begin(), r.amplitudes().end()};
  } else {
    return std::vector<cplx>(r.begin(), r.end());
  }
}

}  // namespace detail

/// QFI matrix of a parameterized pure state by central differences with one
/// Richardson halving: F_ij = 4 Re[<∂iψ|∂jψ> − <∂iψ|ψ><ψ|∂jψ>].
/// `generator(chi)` returns a StateVector or a complex amplitude sequence.
template <class Generator>
QfiMatrix qfi_numeric(Generator&& generator, std::span<const double> chi0, const FiniteDifference& fd = {}) {
  const std::size_t d = chi0.size();
  auto eval = [&](std::span<const double> chi) {
    auto a = detail::as_amplitudes(generator(chi));
    double n2 = 0.0;
    for (const auto& x : a) n2 += std::norm(x);
    const double nrm = std::sqrt(n2);
    if (std::abs(nrm - 1.0) > fd.norm_tolerance)
      throw NumericalError("qfi_numeric: generated state norm drifts from 1 by " + std::to_string(nrm - 1.0));
    for (auto& x : a) x /= nrm;
    return a;
  };

  const auto psi = eval(chi0);
  const std::size_t dim = psi.size();
  std::vector<std::vector<cplx>> deriv(d);
  std::vector<double> chi(chi0.begin(), chi0.end());
  auto central = [&](std::size_t i, double h) {
    chi[i] = chi0[i] + h;
    const auto plus = eval(chi);
    chi[i] = chi0[i] - h;
    const auto minus = eval(chi);
    chi[i] = chi0[i];
    std::vector<cplx> out(dim);
    for (std::size_t m = 0; m < dim; ++m) out[m] = (plus[m] - minus[m]) / (2.0 * h);
    return out;
  };
  for (std::size_t i = 0; i < d; ++i) {
    const auto coarse = central(i, fd.step);
    const auto fine = central(i, 0.5 * fd.step);
    deriv[i].resize(dim);
    for (std::size_t m = 0; m < dim; ++m) deriv[i][m] = (4.0 * fine[m] - coarse[m]) / 3.0;
  }

  auto braket = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s{};
    for (std::size_t m = 0; m < dim; ++m) s += std::conj(a[m]) * b[m];
    return s;
  };
  QfiMatrix f(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      f(i, j) = 4.0 * (braket(deriv[i], deriv[j]) - braket(deriv[i], psi) * braket(psi, deriv[j])).real();
  return f;
}

// ---------------------------------------------------------------------------
// Single-parameter χ = Λ/N² estimation with the stationary soliton N00N states
//   |N00N>_± = (|N,0,0> + e^{iNΘ±}|0,N,0> + e^{±iNΘ±}|0,0,N>)/√3.

enum class PhaseBranch { In, Out };

inline const char* to_string(PhaseBranch b) { return b == PhaseBranch::In ? "in" : "out"; }

/// Evaluation point standing in for Λ → 0⁺.
inline constexpr double kChiEvaluationLambda = 1e-9;

/// Stationary phase of the branch without range checks (usable slightly
/// outside [0, 2.08] by finite-difference stencils).
inline double branch_phase(PhaseBranch b, double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  const double c = b == PhaseBranch::In ? cos_theta_in(lambda, k) : cos_theta_out(lambda, k);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline StateVector noon_branch_state(const FockBasis3& basis, PhaseBranch b, double lambda,
                                     const PhaseConstants& k = PhaseConstants::rounded()) {
  const double phase = basis.particles() * branch_phase(b, lambda, k);
  return state_noon(basis, phase, b == PhaseBranch::In ? phase : -phase);
}

struct ChiQfi {
  double fisher = 0.0;
  double sigma = 0.0;           // 1/√F
  double theta = 0.0;           // Θ± at the evaluation point
  double dtheta_dlambda = 0.0;  // from implicit differentiation of the stationary relation
  bool singular = false;        // sin Θ → 0, dΘ/dΛ diverges
};

/// QFI for χ with the in- or out-of-phase N00N state, ∂_χ = N² ∂_Λ.
inline ChiQfi chi_qfi_pm(int n, double lambda, PhaseBranch b, const PhaseConstants& k = PhaseConstants::rounded()) {
  if (n < 1) throw ConfigError("chi_qfi_pm: N must be >= 1");
  ChiQfi r;
  r.theta = b == PhaseBranch::In ? stationary_phase_in(lambda, k) : stationary_phase_out(lambda, k);
  const double dcos = b == PhaseBranch::In ? dcos_theta_in(lambda, k) : dcos_theta_out(lambda, k);
  const double sin_t = std::sin(r.theta);
  r.singular = sin_t < 1e-8;
  r.dtheta_dlambda = -dcos / sin_t;

  // Phase rates dφ/dχ of the three edge kets, each with weight 1/3.
  const double nn = n;
  const double rate = nn * nn * nn * r.dtheta_dlambda;
  const double g2 = rate, g3 = b == PhaseBranch::In ? rate : -rate;
  const double mean = (g2 + g3) / 3.0;
  const double second = (g2 * g2 + g3 * g3) / 3.0;
  r.fisher = 4.0 * (second - mean * mean);
  r.sigma = 1.0 / std::sqrt(r.fisher);
  return r;
}

// ---------------------------------------------------------------------------
// Bound table

struct BoundRow {
  int d = 0, particles = 0, k = 0;
  double eps = 0.0;  // NaN when the bound is not tied to a N00N amplitude
  double sigma = 0.0;
  std::string label;  // GHL, balanced, optimized, SQL, NQL
};

inline double sql(int n);
inline double nql(int n);

inline std::vector<BoundRow> bound_table(std::span<const int> ds, int n, int k) {
  std::vector<BoundRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int d : ds) {
    rows.push_back({d, n, k, 1.0 / std::sqrt(2.0), ghl(n, k), "GHL"});
    rows.push_back({d, n, k, 1.0 / std::sqrt(d + 1.0), balanced_bound(d, n, k), "balanced"});
    rows.push_back({d, n, k, optimized_eps(d), optimized_bound(d, n, k), "optimized"});
    if (d == 2) {
      if (k == 1) rows.push_back({d, n, k, nan, sql(n), "SQL"});
      if (k == 3) rows.push_back({d, n, k, nan, nql(n), "NQL"});
    }
  }
  return rows;
}

/// Classical three-mode baselines (two estimated phases).
inline double sil(int n, double eta) { return std::sqrt(3.0 / (eta * n)); }
inline double nil(int n, double eta) { return std::sqrt(27.0 / (eta * ipow(n, 5))); }
inline double sql(int n) { return sil(n, 1.0); }
inline double nql(int n) { return nil(n, 1.0); }

}  // namespace solnet
