#pragma once

// Two-parameter phase estimation with particle losses.
//
// Modes 1 and 2 acquire the phases χ1 N1^k and χ2 N2^k relative to mode 3.
// Each mode then passes a fictitious beam splitter of transparency η; tracing
// out the lost particles (l1, l2, l3) leaves the mixture
//   ρ = Σ_l p_l |ξ_l><ξ_l|,
// and the QFI is bounded from above by the p-weighted pure-state QFIs of the
// branches.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solnet/error.hpp"
#include "solnet/fock.hpp"
#include "solnet/hamiltonian.hpp"
#include "solnet/metrology.hpp"
#include "solnet/parallel.hpp"

namespace solnet {

struct LossModel {
  double eta = 1.0;  // per-mode transparency, identical for all modes

  void validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("LossModel: transparency must satisfy 0 < eta <= 1");
  }
};

/// Applies exp[iχ1 (a1†a1)^k + iχ2 (a2†a2)^k].
inline StateVector phase_shift(const StateVector& psi, double chi1, double chi2, int k) {
  StateVector out = psi;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto& s = psi.basis().state_of(i);
    out[i] *= std::polar(1.0, chi1 * ipow(s.n1, k) + chi2 * ipow(s.n2, k));
  }
  return out;
}

namespace detail {

inline double log_binomial(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// log[η^{m−l} (1−η)^l] with 0·log 0 = 0.
inline double log_loss_weight(int kept, int lost, double eta) {
  double w = kept * std::log(eta);
  if (lost > 0) w += lost * std::log1p(-eta);
  return w;
}

}  // namespace detail

/// Probability of losing l of m particles at one beam splitter,
/// C(m,l) η^{m−l} (1−η)^l, for l = 0..m.
inline std::vector<double> fbs_apply_mode(int m, double eta) {
  LossModel{eta}.validate();
  if (m < 0) throw ConfigError("fbs_apply_mode: occupation must be non-negative");
  // Ratios outward from the mode, then normalized: exact sum, no lgamma rounding.
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
  const int mode = std::clamp(static_cast<int>(std::floor((m + 1) * (1.0 - eta))), 0, m);
  const double q = (1.0 - eta) / eta;
  w[mode] = 1.0;
  for (int l = mode; l < m; ++l) w[l + 1] = w[l] * q * (m - l) / (l + 1);
  for (int l = mode; l > 0; --l) w[l - 1] = w[l] * l / (q * (m - l + 1));
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

/// B = C(N1,l1) C(N2,l2) C(N3,l3) η^N (η⁻¹ − 1)^l, evaluated in log space.
inline double b_coeff(int n1, int n2, int n3, int l1, int l2, int l3, double eta) {
  if (l1 < 0 || l2 < 0 || l3 < 0 || l1 > n1 || l2 > n2 || l3 > n3) return 0.0;
  const int n = n1 + n2 + n3, l = l1 + l2 + l3;
  const double lg = detail::log_binomial(n1, l1) + detail::log_binomial(n2, l2) + detail::log_binomial(n3, l3) +
                    detail::log_loss_weight(n - l, l, eta);
  return std::exp(lg);
}

/// Branches with smaller probability are dropped from QFI sums and carry no state.
inline constexpr double kNegligibleBranch = 1e-300;

struct LossBranch {
  int l1 = 0, l2 = 0, l3 = 0;
  double p = 0.0;
  std::optional<StateVector> xi;  // conditional state on N − l particles; empty when p is negligible
};

struct LossDecomposition {
  int particles = 0;
  double eta = 1.0;
  std::vector<LossBranch> branches;  // lexicographic in (l1, l2, l3)

  static constexpr std::size_t branch_count(int n) {
    const auto m = static_cast<std::size_t>(n);
    return (m + 1) * (m + 2) * (m + 3) / 6;
  }
  double total_probability() const {
    double s = 0.0;
    for (const auto& b : branches) s += b.p;
    return s;
  }
};

/// Mixed-state decomposition after phase imprinting and loss.
inline LossDecomposition loss_decompose(const StateVector& psi, double eta, double chi1, double chi2, int k) {
  LossModel{eta}.validate();
  const auto& basis = psi.basis();
  const int n = basis.particles();
  const StateVector shifted = phase_shift(psi, chi1, chi2, k);

  LossDecomposition dec{n, eta, {}};
  dec.branches.reserve(LossDecomposition::branch_count(n));
  for (int l1 = 0; l1 <= n; ++l1)
    for (int l2 = 0; l2 <= n - l1; ++l2)
      for (int l3 = 0; l3 <= n - l1 - l2; ++l3) {
        const FockBasis3 kept(n - l1 - l2 - l3);
        StateVector xi(kept);
        double p = 0.0;
        for (std::size_t i = 0; i < basis.dim(); ++i) {
          const auto& s = basis.state_of(i);
          if (s.n1 < l1 || s.n2 < l2 || s.n3 < l3) continue;
          const double b = b_coeff(s.n1, s.n2, s.n3, l1, l2, l3, eta);
          if (b == 0.0) continue;
          p += std::norm(psi[i]) * b;
          xi.at(s.n1 - l1, s.n2 - l2) = shifted[i] * std::sqrt(b);
        }
        LossBranch br{l1, l2, l3, p, std::nullopt};
        if (p > kNegligibleBranch) {
          xi *= cplx(1.0 / std::sqrt(p));
          br.xi = std::move(xi);
        }
        dec.branches.push_back(std::move(br));
      }
  return dec;
}

/// QFI upper bound matrix for (χ1, χ2):
///   F̃_ij = 4 Σ (N_i N_j)^k |A|² − 4 Σ_l (Σ N_i^k |A|² B_l)(Σ N_j^k |A|² B_l) / p_l.
/// Independent of the imprinted phases.
inline QfiMatrix qfi_upper_bound(const StateVector& psi, double eta, int k) {
  LossModel{eta}.validate();
  const auto& basis = psi.basis();
  const int n = basis.particles();
  const std::size_t dim = basis.dim();

  std::vector<double> prob(dim), g1(dim), g2(dim);
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& s = basis.state_of(i);
    prob[i] = std::norm(psi[i]);
    g1[i] = ipow(s.n1, k);
    g2[i] = ipow(s.n2, k);
    s11 += prob[i] * g1[i] * g1[i];
    s12 += prob[i] * g1[i] * g2[i];
    s22 += prob[i] * g2[i] * g2[i];
  }

  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  for (int l1 = 0; l1 <= n; ++l1)
    for (int l2 = 0; l2 <= n - l1; ++l2)
      for (int l3 = 0; l3 <= n - l1 - l2; ++l3) {
        double p = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          if (prob[i] == 0.0) continue;
          const auto& s = basis.state_of(i);
          if (s.n1 < l1 || s.n2 < l2 || s.n3 < l3) continue;
          const double w = prob[i] * b_coeff(s.n1, s.n2, s.n3, l1, l2, l3, eta);
          p += w;
          m1 += g1[i] * w;
          m2 += g2[i] * w;
        }
        if (p <= kNegligibleBranch) continue;
        c11 += m1 * m1 / p;
        c12 += m1 * m2 / p;
        c22 += m2 * m2 / p;
      }

  QfiMatrix f(2);
  f(0, 0) = 4.0 * (s11 - c11);
  f(0, 1) = f(1, 0) = 4.0 * (s12 - c12);
  f(1, 1) = 4.0 * (s22 - c22);
  return f;
}

/// σ^(k) = √Tr(F̃⁻¹).
inline double sigma_k(const QfiMatrix& f) { return crb_overall(f); }

/// Reference accuracy of the optimized two-phase N00N state, √2.914/N^k.
inline double sigma_os(int n, int k) { return optimized_bound(2, n, k); }

struct SweepRow {
  double lambda = 0.0;
  double eta = 1.0;
  int particles = 0;
  int k = 1;
  double sigma = 0.0;  // NaN when the point failed
  double sigma_ghl = 0.0;
  double sigma_os = 0.0;
  double sigma_balanced = 0.0;
  double sigma_classical = 0.0;  // SIL for k = 1, NIL otherwise
  std::string error;
};

struct SweepOptions {
  unsigned workers = 1;
  GroundStateOptions ground{};
};

/// σ^(k)(Λ, η) over a grid, ground state of the TMSJJ as the probe. Rows are
/// ordered Λ-major, then by position in `etas`. Per-point failures are recorded
/// in the row and do not stop the sweep.
inline std::vector<SweepRow> sigma_sweep(int n, int k, std::span<const double> lambdas, std::span<const double> etas,
                                         const SweepOptions& opt = {}) {
  if (n < 1) throw ConfigError("sigma_sweep: N must be >= 1");
  if (k < 1) throw ConfigError("sigma_sweep: k must be >= 1");
  if (lambdas.empty() || etas.empty()) throw ConfigError("sigma_sweep: empty grid");
  for (double eta : etas) LossModel{eta}.validate();

  std::vector<std::optional<StateVector>> probes(lambdas.size());
  std::vector<std::string> probe_error(lambdas.size());
  parallel_for(lambdas.size(), opt.workers, [&](std::size_t i) {
    try {
      probes[i] = ground_state(build_hamiltonian({n, lambdas[i], 1.0}), opt.ground).state;
    } catch (const std::exception& e) {
      probe_error[i] = e.what();
    }
  });

  std::vector<SweepRow> rows(lambdas.size() * etas.size());
  parallel_for(rows.size(), opt.workers, [&](std::size_t idx) {
    const std::size_t i = idx / etas.size(), j = idx % etas.size();
    SweepRow& r = rows[idx];
    r.lambda = lambdas[i];
    r.eta = etas[j];
    r.particles = n;
    r.k = k;
    r.sigma_ghl = ghl(n, k);
    r.sigma_os = sigma_os(n, k);
    r.sigma_balanced = balanced_bound(2, n, k);
    r.sigma_classical = k == 1 ? sil(n, etas[j]) : nil(n, etas[j]);
    r.sigma = std::numeric_limits<double>::quiet_NaN();
    if (!probes[i]) {
      r.error = probe_error[i];
      return;
    }
    try {
      r.sigma = sigma_k(qfi_upper_bound(*probes[i], etas[j], k));
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return rows;
}

}  // namespace solnet
