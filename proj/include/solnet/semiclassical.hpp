#pragma once

// Hartree (variational) model of three tunnel-coupled bright solitons.
//
// State: populations n_j (Σ n_j = 1) and relative phases Θ12 = θ2 − θ1,
// Θ23 = θ3 − θ2, Θ31 = θ1 − θ3. Energies are per particle in units of 2κ and
// time is τ = 2κt.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "solnet/error.hpp"

namespace solnet {

struct PhysicalParams {
  double u = 0.0;  // nonlinear interaction strength
  double kappa = 1.0;
  int particles = 20;

  double lambda() const {
    const double m = particles - 1;
    return u * u * m * m / (16.0 * kappa);
  }
  /// Estimand χ = Λ/N².
  double chi() const {
    const double n = particles;
    return lambda() / (n * n);
  }
  void validate() const {
    if (!(u >= 0.0)) throw ConfigError("PhysicalParams: u must be >= 0");
    if (!(kappa > 0.0)) throw ConfigError("PhysicalParams: kappa must be > 0");
    if (particles < 1) throw ConfigError("PhysicalParams: N must be >= 1");
  }
};

struct SemiclassicalState {
  std::array<double, 3> n{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> theta{0.0, 0.0, 0.0};  // Θ12, Θ23, Θ31

  /// Builds the relative phases from absolute soliton phases.
  static SemiclassicalState from_phases(std::array<double, 3> pop, std::array<double, 3> abs_phase) {
    return {pop, {abs_phase[1] - abs_phase[0], abs_phase[2] - abs_phase[1], abs_phase[0] - abs_phase[2]}};
  }

  void validate(double tol = 1e-10) const {
    for (double x : n)
      if (x < -tol) throw ConfigError("SemiclassicalState: negative population");
    if (std::abs(n[0] + n[1] + n[2] - 1.0) > tol) throw ConfigError("SemiclassicalState: populations must sum to 1");
    const double s = std::remainder(theta[0] + theta[1] + theta[2], 2.0 * std::numbers::pi);
    if (std::abs(s) > tol) throw ConfigError("SemiclassicalState: relative phases must sum to 0 mod 2π");
  }
};

struct SemiclassicalRate {
  std::array<double, 3> n_dot{};
  std::array<double, 3> theta_dot{};
};

namespace detail {

// Pair p joins modes (p, p+1 mod 3): pairs 12, 23, 31.
constexpr std::size_t pair_first(std::size_t p) { return p; }
constexpr std::size_t pair_second(std::size_t p) { return (p + 1) % 3; }

inline double tunnel_shape(double z) { return (1.0 - z * z) * (1.0 - 0.21 * z * z); }
inline double tunnel_slope(double z) { return 1.21 - 0.42 * z * z; }

}  // namespace detail

/// I_ij = n_ij (1 − z_ij²)(1 − 0.21 z_ij²); zero when both wells are empty.
inline double tunneling_weight(double ni, double nj) {
  const double s = ni + nj;
  if (s == 0.0) return 0.0;
  return s * detail::tunnel_shape((nj - ni) / s);
}

/// Effective energy per particle, units of 2κ.
inline double heff(const SemiclassicalState& s, double lambda) {
  double self = 0.0;
  for (double x : s.n) self += x * x * x;
  double hop = 0.0;
  for (std::size_t p = 0; p < 3; ++p) {
    const double w = tunneling_weight(s.n[detail::pair_first(p)], s.n[detail::pair_second(p)]);
    hop += w * std::cos(s.theta[p]);
  }
  // Ordered double sum over i≠j with prefactor 1/4 = unordered pairs with 1/2.
  return -(lambda / 3.0 * self + 0.5 * hop);
}

/// Right-hand side of the Hartree equations of motion in τ.
inline SemiclassicalRate eom_rhs(const SemiclassicalState& s, double lambda) {
  std::array<double, 3> sum{}, z{}, f{}, g{};
  for (std::size_t p = 0; p < 3; ++p) {
    const double ni = s.n[detail::pair_first(p)];
    const double nj = s.n[detail::pair_second(p)];
    sum[p] = ni + nj;
    if (!(sum[p] > 0.0)) throw NumericalError("eom_rhs: singular state, a population pair is empty");
    z[p] = (nj - ni) / sum[p];
    f[p] = detail::tunnel_shape(z[p]);
    g[p] = detail::tunnel_slope(z[p]);
  }
  SemiclassicalRate r;
  // Mode j: gains from pair (j-1, j), loses to pair (j, j+1).
  for (std::size_t j = 0; j < 3; ++j) {
    const std::size_t in = (j + 2) % 3;
    const std::size_t out = j;
    r.n_dot[j] = 0.5 * sum[in] * f[in] * std::sin(s.theta[in]) - 0.5 * sum[out] * f[out] * std::sin(s.theta[out]);
  }
  // Pair p = (i, j) with the remaining mode m; next pair q = (j, m), previous pair o = (m, i).
  for (std::size_t p = 0; p < 3; ++p) {
    const std::size_t q = (p + 1) % 3;
    const std::size_t o = (p + 2) % 3;
    const double nm = s.n[(p + 2) % 3];
    r.theta_dot[p] = lambda * sum[p] * sum[p] * z[p] - 2.0 * z[p] * g[p] * std::cos(s.theta[p]) +
                     (0.5 * f[q] + 2.0 * nm * z[q] / sum[q] * g[q]) * std::cos(s.theta[q]) -
                     (0.5 * f[o] - 2.0 * nm * z[o] / sum[o] * g[o]) * std::cos(s.theta[o]);
  }
  return r;
}

struct TrajectoryPoint {
  double tau = 0.0;
  SemiclassicalState state;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double energy_drift = 0.0;         // max |H_eff(τ) − H_eff(0)|
  double normalization_drift = 0.0;  // max |Σn − Σn(0)|
  double step_tolerance = 0.0;       // per-step tolerance finally used
};

struct IntegrateOptions {
  double output_dt = 0.0;          // 0: record every accepted step
  double singular_threshold = 1e-12;  // smallest admissible pair population
  int max_refinements = 4;         // tolerance tightenings when drift exceeds tol
};

namespace detail {

using Vec6 = std::array<double, 6>;

inline SemiclassicalState unpack(const Vec6& y) { return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}}; }
inline Vec6 pack(const SemiclassicalState& s) {
  return {s.n[0], s.n[1], s.n[2], s.theta[0], s.theta[1], s.theta[2]};
}

inline Vec6 rhs6(const Vec6& y, double lambda, double threshold) {
  const auto s = unpack(y);
  for (std::size_t p = 0; p < 3; ++p)
    if (s.n[pair_first(p)] + s.n[pair_second(p)] < threshold)
      throw NumericalError("integrate: trajectory reached a singular state (empty population pair)");
  const auto r = eom_rhs(s, lambda);
  return {r.n_dot[0], r.n_dot[1], r.n_dot[2], r.theta_dot[0], r.theta_dot[1], r.theta_dot[2]};
}

// Dormand–Prince 5(4), first-same-as-last, elementary step control.
inline Trajectory dopri5(const SemiclassicalState& s0, double lambda, double tau_end, double rtol,
                         const IntegrateOptions& opt) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Trajectory tr;
  tr.step_tolerance = rtol;
  const double e0 = heff(s0, lambda);
  const double sum0 = s0.n[0] + s0.n[1] + s0.n[2];
  Vec6 y = pack(s0);
  tr.points.push_back({0.0, s0, e0});
  if (tau_end == 0.0) return tr;

  const double dir = tau_end > 0 ? 1.0 : -1.0;
  const double span = std::abs(tau_end);
  double t = 0.0;  // elapsed |τ|
  double h = std::min(span, 1e-2);
  double next_out = opt.output_dt > 0 ? opt.output_dt : 0.0;
  Vec6 k1 = rhs6(y, lambda, opt.singular_threshold);
  std::size_t guard = 0;

  auto stage = [&](const std::array<double, 6>& base, std::initializer_list<std::pair<double, const Vec6*>> terms,
                   double hh) {
    Vec6 out = base;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < 6; ++i) out[i] += hh * c * (*k)[i];
    return out;
  };

  while (t < span) {
    if (++guard > 50'000'000) throw NumericalError("integrate: too many steps");
    double hstep = std::min(h, span - t);
    bool clipped = false;
    if (opt.output_dt > 0 && t + hstep > next_out) {
      hstep = next_out - t;
      clipped = true;
    }
    if (hstep < 1e-14 * std::max(1.0, span)) throw NumericalError("integrate: step size underflow");
    const double hh = dir * hstep;
    const Vec6 k2 = rhs6(stage(y, {{a21, &k1}}, hh), lambda, opt.singular_threshold);
    const Vec6 k3 = rhs6(stage(y, {{a31, &k1}, {a32, &k2}}, hh), lambda, opt.singular_threshold);
    const Vec6 k4 = rhs6(stage(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, hh), lambda, opt.singular_threshold);
    const Vec6 k5 =
        rhs6(stage(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, hh), lambda, opt.singular_threshold);
    const Vec6 k6 = rhs6(stage(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, hh), lambda,
                         opt.singular_threshold);
    const Vec6 y5 = stage(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, hh);
    const Vec6 k7 = rhs6(y5, lambda, opt.singular_threshold);

    double err = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const double ei = hh * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = rtol * (1.0 + std::max(std::abs(y[i]), std::abs(y5[i])));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (err <= 1.0) {
      t += hstep;
      y = y5;
      k1 = k7;
      const auto s = unpack(y);
      const double e = heff(s, lambda);
      tr.energy_drift = std::max(tr.energy_drift, std::abs(e - e0));
      tr.normalization_drift = std::max(tr.normalization_drift, std::abs(s.n[0] + s.n[1] + s.n[2] - sum0));
      const bool at_output = opt.output_dt <= 0 || clipped || t >= span;
      if (at_output) {
        tr.points.push_back({dir * t, s, e});
        if (opt.output_dt > 0 && clipped) next_out += opt.output_dt;
      }
      if (clipped) continue;  // keep the pre-clip step proposal
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = hstep * fac;
  }
  return tr;
}

}  // namespace detail

/// Adaptive Dormand–Prince integration of the equations of motion. The
/// per-step tolerance is tightened until both the H_eff drift and the
/// normalization drift over the trajectory are at most `tol`. Phases are not
/// wrapped. Negative τ_end integrates backwards in time.
inline Trajectory integrate(const SemiclassicalState& s0, double lambda, double tau_end, double tol,
                            const IntegrateOptions& opt = {}) {
  s0.validate();
  if (!(tol > 0.0)) throw ConfigError("integrate: tolerance must be positive");
  double step_tol = tol;
  Trajectory tr;
  for (int attempt = 0; attempt <= opt.max_refinements; ++attempt) {
    tr = detail::dopri5(s0, lambda, tau_end, step_tol, opt);
    if (tr.energy_drift <= tol && tr.normalization_drift <= tol) return tr;
    step_tol *= 0.1;
  }
  throw NumericalError("integrate: drift exceeds tolerance after step refinement");
}

/// Constants of the δ → 0 stationary phase relations. `rounded()` holds the
/// customary three-digit values; `closed()` uses offset = 0.79² + 0.5, which makes
/// the out-of-phase formula an exact root of the phase-consistency relation.
struct PhaseConstants {
  double offset = 1.124;
  double shift = 0.79;
  double slope = 1.58;
  double half = 0.5;

  static constexpr PhaseConstants rounded() { return {}; }
  static constexpr PhaseConstants closed() { return {0.79 * 0.79 + 0.5, 0.79, 1.58, 0.5}; }
};

/// Upper end of the Λ range where the in/out-of-phase stationary solutions exist.
inline constexpr double kStationaryLambdaMax = 2.08;

namespace detail {

inline void check_stationary_range(double lambda, double c) {
  if (!(lambda >= 0.0 && lambda <= kStationaryLambdaMax))
    throw DomainError("stationary phase: Lambda outside [0, 2.08]");
  if (std::abs(c) > 1.0 + 1e-12) throw DomainError("stationary phase: |cos| > 1");
}

}  // namespace detail

inline double cos_theta_out(double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  return std::sqrt(k.offset + lambda) - k.shift;
}
inline double cos_theta_in(double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  return (lambda - k.half) / k.slope;
}
inline double dcos_theta_out(double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  return 0.5 / std::sqrt(k.offset + lambda);
}
inline double dcos_theta_in(double /*lambda*/, const PhaseConstants& k = PhaseConstants::rounded()) {
  return 1.0 / k.slope;
}

/// Out-of-phase stationary phase Θ₋ ∈ [0, π] (Θ12 = Θ31 = Θ₋, Θ23 = −2Θ₋).
inline double stationary_phase_out(double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  const double c = cos_theta_out(lambda, k);
  detail::check_stationary_range(lambda, c);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// In-phase stationary phase Θ₊ ∈ [0, π] (Θ12 = −Θ31 = Θ₊, Θ23 = 0).
inline double stationary_phase_in(double lambda, const PhaseConstants& k = PhaseConstants::rounded()) {
  const double c = cos_theta_in(lambda, k);
  detail::check_stationary_range(lambda, c);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// cos Θ12 = cos Θ31 implied by Θ23 in the single-soliton limit.
inline double phase_consistency(double lambda, double theta23,
                                const PhaseConstants& k = PhaseConstants::rounded()) {
  return (lambda - k.half * std::cos(theta23)) / k.slope;
}

/// Largest |rate| of the equations of motion at n = (1−2δ, δ, δ), linearly
/// extrapolated to δ → 0 from δ and δ/2.
inline double stationary_residual(double lambda, std::array<double, 3> theta, double delta = 1e-6) {
  auto rates = [&](double d) {
    const auto r = eom_rhs({{1.0 - 2.0 * d, d, d}, theta}, lambda);
    return std::array<double, 6>{r.n_dot[0],     r.n_dot[1],     r.n_dot[2],
                                 r.theta_dot[0], r.theta_dot[1], r.theta_dot[2]};
  };
  const auto full = rates(delta);
  const auto half = rates(0.5 * delta);
  double worst = 0.0;
  for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, std::abs(2.0 * half[i] - full[i]));
  return worst;
}

/// Samples ψ_j(x) = n_j (√(u(N−1))/2) sech(u(N−1) n_j x / 2) e^{iθ_j}.
inline std::vector<std::complex<double>> soliton_waveform(double nj, double theta_j, double u, int particles,
                                                          std::span<const double> x) {
  if (nj < 0.0 || nj > 1.0) throw ConfigError("soliton_waveform: population must lie in [0, 1]");
  if (!(u >= 0.0) || particles < 1) throw ConfigError("soliton_waveform: invalid u or N");
  const double g = u * (particles - 1);
  const double amp = nj * std::sqrt(g) / 2.0;
  const auto phase = std::polar(1.0, theta_j);
  std::vector<std::complex<double>> out;
  out.reserve(x.size());
  for (double xi : x) out.push_back(amp / std::cosh(0.5 * g * nj * xi) * phase);
  return out;
}

/// Trapezoidal ∫|ψ|² dx over the sample grid. Analytically the waveform norm is n_j.
inline double waveform_norm(std::span<const std::complex<double>> psi, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    s += 0.5 * (std::norm(psi[i]) + std::norm(psi[i - 1])) * (x[i] - x[i - 1]);
  return s;
}

}  // namespace solnet
