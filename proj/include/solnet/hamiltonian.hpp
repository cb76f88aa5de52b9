#pragma once

// Quantized three-mode soliton Josephson junction.
//
// Matrix elements are stored in dimensionless per-particle units of 2κ: an
// eigenvalue λ corresponds to the physical energy E = 2κNλ, i.e. E/(κN) = 2λ.
// With A_{N1,N2}(τ), τ = 2κt, the amplitudes obey i dA/dτ = H A where
//
//   (H A)_{N1,N2} = α_{N1,N2} A_{N1,N2}
//                 + β_{N1,N2} A_{N1-1,N2+1} + β_{N2,N1} A_{N1+1,N2-1}
//                 + β_{N2,N3} A_{N1,N2-1}   + β_{N3,N2} A_{N1,N2+1}
//                 + β_{N3,N1} A_{N1+1,N2}   + β_{N1,N3} A_{N1-1,N2}.
//
// The nonlinear tunneling factors sqrt(1 - z^2)(1 - 0.21 z^2) of the
// semiclassical model appear here through the closed-form β coefficients, so
// no operator Taylor series is ever truncated.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "solnet/error.hpp"
#include "solnet/fock.hpp"
#include "solnet/linalg.hpp"

namespace solnet {

struct TmsjjParams {
  int particles = 20;
  double lambda = 0.0;  // Λ = u²(N−1)²/(16κ)
  double kappa = 1.0;   // tunneling rate; only sets the time unit

  void validate() const {
    if (particles < 1) throw ConfigError("TmsjjParams: N must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("TmsjjParams: Lambda must be >= 0");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("TmsjjParams: kappa must be > 0");
  }
};

/// Intra-well interaction energy of |n1, n2, N-n1-n2>.
inline double alpha(int n1, int n2, int total, double lambda) {
  const double n3 = total - n1 - n2;
  const double nt = total;
  return -(lambda / 3.0) * (std::pow(n1, 3) + std::pow(n2, 3) + n3 * n3 * n3) / (nt * nt * nt);
}

/// Single-particle tunneling coefficient between wells holding ni and nj
/// particles. The point ni + nj = 0 is a removable 0/0 and yields 0.
inline double beta(int ni, int nj, int total) {
  if (ni + nj == 0) return 0.0;
  const double a = ni, b = nj, s = ni + nj;
  const double root_ii = ni >= 2 ? std::sqrt(a * (a - 1.0)) : 0.0;
  const double root_jj = std::sqrt(b * (b + 1.0));
  const double z0 = (b - a) / s;
  const double z2 = (b - a + 2.0) / s;
  const double first = (b + 1.0) * root_ii * (1.0 - 0.21 * z0 * z0);
  const double second = a * root_jj * (1.0 - 0.21 * z2 * z2);
  return -1.0 / (2.0 * total) / s * (first + second);
}

/// Real symmetric TMSJJ matrix in compressed-row form (diagonal plus at most
/// six single-hop neighbours per row).
class SymmetricHamiltonian {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  SymmetricHamiltonian(FockBasis3 basis, TmsjjParams params)
      : basis_(std::move(basis)), params_(params) {}

  const FockBasis3& basis() const { return basis_; }
  const TmsjjParams& params() const { return params_; }
  std::size_t dim() const { return basis_.dim(); }
  double max_asymmetry() const { return max_asymmetry_; }

  std::span<const Entry> row(std::size_t r) const {
    return {entries_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
  }

  double entry(std::size_t r, std::size_t c) const {
    for (const auto& e : row(r))
      if (e.col == c) return e.value;
    return 0.0;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
  }

  /// Gershgorin bound on the spectral radius.
  double spectral_bound() const {
    double m = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) {
      double s = 0.0;
      for (const auto& e : row(r)) s += std::abs(e.value);
      m = std::max(m, s);
    }
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t r = 0; r < dim(); ++r) t += entry(r, r);
    return t;
  }

  template <class T>
  void apply(std::span<const T> x, std::span<T> y) const {
    for (std::size_t r = 0; r < dim(); ++r) {
      T s{};
      for (const auto& e : row(r)) s += e.value * x[e.col];
      y[r] = s;
    }
  }

  StateVector apply(const StateVector& x) const {
    StateVector y(basis_);
    apply<cplx>(x.amplitudes(), y.amplitudes());
    return y;
  }

  Matrix to_dense() const {
    Matrix m(dim());
    for (std::size_t r = 0; r < dim(); ++r)
      for (const auto& e : row(r)) m(r, e.col) += e.value;
    return m;
  }

 private:
  friend SymmetricHamiltonian build_hamiltonian(const TmsjjParams&);

  FockBasis3 basis_;
  TmsjjParams params_;
  std::vector<std::size_t> row_ptr_;
  std::vector<Entry> entries_;
  double max_asymmetry_ = 0.0;
};

/// Relative symmetry tolerance enforced by build_hamiltonian.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Assembles H for the given parameters and verifies symmetry entry by entry.
/// Throws NumericalError when |H_ab - H_ba| exceeds kSymmetryTolerance * max|H|.
inline SymmetricHamiltonian build_hamiltonian(const TmsjjParams& params) {
  params.validate();
  const int n = params.particles;
  SymmetricHamiltonian h(FockBasis3(n), params);
  const auto& basis = h.basis_;
  h.row_ptr_.reserve(basis.dim() + 1);
  h.row_ptr_.push_back(0);

  for (std::size_t r = 0; r < basis.dim(); ++r) {
    const auto [n1, n2, n3] = basis.state_of(r);
    h.entries_.push_back({r, alpha(n1, n2, n, params.lambda)});
    const std::array<std::array<int, 2>, 6> shift{{{-1, 1}, {1, -1}, {0, -1}, {0, 1}, {1, 0}, {-1, 0}}};
    const std::array<double, 6> coeff{beta(n1, n2, n), beta(n2, n1, n), beta(n2, n3, n),
                                      beta(n3, n2, n), beta(n3, n1, n), beta(n1, n3, n)};
    for (std::size_t k = 0; k < shift.size(); ++k) {
      const int m1 = n1 + shift[k][0];
      const int m2 = n2 + shift[k][1];
      if (!basis.contains(m1, m2) || coeff[k] == 0.0) continue;
      h.entries_.push_back({basis.index_of(m1, m2), coeff[k]});
    }
    h.row_ptr_.push_back(h.entries_.size());
  }

  double asym = 0.0;
  for (std::size_t r = 0; r < h.dim(); ++r)
    for (const auto& e : h.row(r)) asym = std::max(asym, std::abs(e.value - h.entry(e.col, r)));
  h.max_asymmetry_ = asym;
  if (asym > kSymmetryTolerance * h.max_abs())
    throw NumericalError("build_hamiltonian: assembled matrix is not symmetric (max asymmetry " +
                         std::to_string(asym) + ")");
  return h;
}

/// Physical energy axis E/(κN) for a dimensionless eigenvalue.
constexpr double energy_per_kappa_n(double lambda_value) { return 2.0 * lambda_value; }

/// <ψ|H|ψ> for a normalized ψ.
inline double expectation(const SymmetricHamiltonian& h, const StateVector& psi) {
  return inner(psi, h.apply(psi)).real();
}

struct SpectrumResult {
  double lambda = 0.0;
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // optional, real amplitudes in basis order
};

inline SpectrumResult spectrum(const SymmetricHamiltonian& h, bool want_vectors) {
  auto sys = symmetric_eigen(h.to_dense(), want_vectors);
  return {h.params().lambda, std::move(sys.values), std::move(sys.vectors)};
}

inline StateVector to_state(const FockBasis3& basis, std::span<const double> real_amplitudes) {
  StateVector v(basis);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = real_amplitudes[i];
  return v;
}

/// Total weight on |N,0,0>, |0,N,0>, |0,0,N>: the transition order parameter.
inline double edge_population(const StateVector& psi) {
  const int n = psi.basis().particles();
  if (n == 0) return std::norm(psi[0]);
  return std::norm(psi.at(n, 0)) + std::norm(psi.at(0, n)) + std::norm(psi.at(0, 0));
}

/// |<N00N|ψ>|² against the balanced, zero-phase three-mode N00N state.
inline double noon_fidelity(const StateVector& psi) {
  return std::norm(inner(state_noon(psi.basis(), 0.0, 0.0), psi));
}

enum class EigenMethod { Auto, Dense, Lanczos };

struct GroundStateOptions {
  EigenMethod method = EigenMethod::Auto;
  std::size_t dense_limit = 600;  // Auto switches to Lanczos above this dimension
  double degeneracy_gap = 1e-10;
  LanczosOptions lanczos{};
};

struct GroundState {
  double lambda0 = 0.0;
  double lambda1 = 0.0;  // next level, for the gap
  StateVector state;
  bool degenerate = false;
  std::optional<StateVector> partner;  // second state of a degenerate pair
  double residual = 0.0;               // ||H psi - lambda0 psi||

  double gap() const { return lambda1 - lambda0; }
};

namespace detail {

// Global phase convention: the largest-modulus amplitude is real positive.
inline void fix_phase(StateVector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-14) best = i;
  if (std::abs(v[best]) == 0.0) return;
  v *= std::conj(v[best]) / std::abs(v[best]);
}

// Projection onto the sector symmetric under cyclic mode relabeling.
inline StateVector symmetrize(const StateVector& v) {
  const StateVector c1 = cycle_modes(v);
  const StateVector c2 = cycle_modes(c1);
  StateVector s(v.basis());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = (v[i] + c1[i] + c2[i]) / 3.0;
  return s;
}

}  // namespace detail

/// Lowest eigenpair of H. Near an exact degeneracy (gap below the option
/// threshold) both states are reported and `state` is the permutation-even
/// combination of the pair.
inline GroundState ground_state(const SymmetricHamiltonian& h, const GroundStateOptions& opt = {}) {
  const std::size_t dim = h.dim();
  const bool dense =
      opt.method == EigenMethod::Dense || (opt.method == EigenMethod::Auto && dim <= opt.dense_limit);
  EigenSystem sys;
  if (dense) {
    sys = symmetric_eigen(h.to_dense(), true);
  } else {
    sys = lanczos_lowest(
        dim, [&](std::span<const double> x, std::span<double> y) { h.apply<double>(x, y); },
        std::min<std::size_t>(2, dim), opt.lanczos);
  }

  GroundState g{sys.values[0], sys.values.size() > 1 ? sys.values[1] : sys.values[0],
                to_state(h.basis(), sys.vectors[0]), false, std::nullopt, 0.0};
  if (sys.values.size() > 1 && g.gap() < opt.degeneracy_gap) {
    g.degenerate = true;
    StateVector other = to_state(h.basis(), sys.vectors[1]);
    StateVector e0 = detail::symmetrize(g.state);
    StateVector e1 = detail::symmetrize(other);
    StateVector even = norm(e0) >= norm(e1) ? e0 : e1;
    g.partner = std::move(other);
    g.state = normalize(std::move(even));
  }
  detail::fix_phase(g.state);

  const StateVector hpsi = h.apply(g.state);
  double r = 0.0;
  for (std::size_t i = 0; i < dim; ++i) r += std::norm(hpsi[i] - g.lambda0 * g.state[i]);
  g.residual = std::sqrt(r);
  return g;
}

struct EvolveResult {
  StateVector state;
  double step = 0.0;
  std::size_t steps = 0;
};

/// Integrates i dψ/dτ = Hψ with classic RK4. The step is chosen so that the
/// RK4 norm defect, (ρ dt)^6 / 72 per step for spectral radius ρ, accumulates
/// to at most `tol` per unit τ. Negative τ_end integrates backwards.
inline EvolveResult evolve(const SymmetricHamiltonian& h, const StateVector& psi, double tau_end,
                           double tol = 1e-9) {
  require_same_basis(psi, StateVector(h.basis()));
  if (!(tol > 0.0)) throw ConfigError("evolve: tolerance must be positive");
  const double rho = std::max(h.spectral_bound(), 1e-300);
  double dt = std::pow(72.0 * tol / std::pow(rho, 6.0), 1.0 / 5.0);
  dt = std::min(dt, 0.5 / rho);
  const double span_tau = std::abs(tau_end);
  const double count = std::ceil(span_tau / dt);
  if (count > 1e9) throw NumericalError("evolve: step size underflow");
  const std::size_t steps = span_tau == 0.0 ? 0 : static_cast<std::size_t>(count);
  const double step = steps ? tau_end / static_cast<double>(steps) : 0.0;

  const std::size_t n = h.dim();
  std::vector<cplx> y(psi.amplitudes().begin(), psi.amplitudes().end());
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const cplx mi(0.0, -1.0);
  auto rhs = [&](const std::vector<cplx>& x, std::vector<cplx>& out) {
    h.apply<cplx>(x, out);
    for (auto& v : out) v *= mi;
  };
  for (std::size_t s = 0; s < steps; ++s) {
    rhs(y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * step * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * step * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + step * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return {StateVector(h.basis(), std::move(y)), step, steps};
}

inline StateVector evolve(const StateVector& psi, const TmsjjParams& params, double tau_end,
                          double tol = 1e-9) {
  return evolve(build_hamiltonian(params), psi, tau_end, tol).state;
}

struct CriticalPoint {
  double lambda_cr = 0.0;
  double lo = 0.0, hi = 0.0;  // final bracket
  double order_lo = 0.0, order_hi = 0.0;
  int iterations = 0;
};

inline double ground_edge_population(int n, double lambda, const GroundStateOptions& opt = {}) {
  return edge_population(ground_state(build_hamiltonian({n, lambda, 1.0}), opt).state);
}

/// Bisection on the ground-state edge population crossing 1/2.
inline CriticalPoint detect_lambda_cr(int n, double lo, double hi, double tol_lambda,
                                      const GroundStateOptions& opt = {}) {
  if (!(lo < hi)) throw ConfigError("detect_lambda_cr: bracket must satisfy lo < hi");
  if (!(tol_lambda > 0.0)) throw ConfigError("detect_lambda_cr: tolerance must be positive");
  CriticalPoint cp{0.0, lo, hi, ground_edge_population(n, lo, opt), ground_edge_population(n, hi, opt), 0};
  if (!(cp.order_lo < 0.5 && cp.order_hi > 0.5))
    throw DomainError("detect_lambda_cr: no crossing of the order parameter in [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  while (cp.hi - cp.lo > tol_lambda) {
    const double mid = 0.5 * (cp.lo + cp.hi);
    const double order = ground_edge_population(n, mid, opt);
    if (order < 0.5) {
      cp.lo = mid;
      cp.order_lo = order;
    } else {
      cp.hi = mid;
      cp.order_hi = order;
    }
    ++cp.iterations;
  }
  cp.lambda_cr = 0.5 * (cp.lo + cp.hi);
  return cp;
}

}  // namespace solnet
