#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "solnet/hamiltonian.hpp"
#include "support.hpp"

using namespace solnet;

namespace {
constexpr double kLambdaCrQuoted = 3.30272;
}

TEST(Coefficients, AlphaExamples) {
  for (double lam : {0.0, 1.0, 3.3}) {
    EXPECT_NEAR(alpha(7, 0, 7, lam), -lam / 3.0, 1e-15);
    EXPECT_NEAR(alpha(1, 1, 3, lam), -lam / 27.0, 1e-15);
  }
  EXPECT_NEAR(alpha(7, 7, 20, 3.3), -0.124025, 1e-12);
}

TEST(Coefficients, BetaExamples) {
  EXPECT_NEAR(beta(2, 0, 2), -std::sqrt(2.0) * 0.79 / 8.0, 1e-15);
  EXPECT_NEAR(beta(2, 0, 2), -0.139654, 1e-6);
  EXPECT_NEAR(beta(1, 1, 3), -std::sqrt(2.0) * 0.79 / 12.0, 1e-15);
  EXPECT_NEAR(beta(1, 1, 3), -0.093103, 1e-6);
  EXPECT_EQ(beta(0, 0, 5), 0.0);
  // Ni = 0: both terms carry a vanishing factor.
  for (int nj = 1; nj <= 5; ++nj) EXPECT_EQ(beta(0, nj, 5), 0.0);
  // Ni = 1: the √(Ni(Ni−1)) term vanishes, only the second term survives.
  EXPECT_EQ(beta(1, 0, 4), 0.0);
  EXPECT_NEAR(beta(1, 2, 5), -1.0 / 10.0 / 3.0 * std::sqrt(6.0) * 0.79, 1e-15);
}

TEST(Build, SymmetryAcrossSizesAndCouplings) {
  for (int n = 1; n <= 40; ++n)
    for (double lam : {0.0, 1.0, kLambdaCrQuoted, 5.0}) {
      auto h = build_hamiltonian({n, lam, 1.0});
      EXPECT_LE(h.max_asymmetry(), 1e-12 * h.max_abs()) << n << " " << lam;
    }
}

TEST(Build, SparsityIsSingleHop) {
  auto h = build_hamiltonian({12, 2.0, 1.0});
  const auto& b = h.basis();
  for (std::size_t r = 0; r < h.dim(); ++r) {
    EXPECT_LE(h.row(r).size(), 7u);
    const auto& s = b.state_of(r);
    for (const auto& e : h.row(r)) {
      const auto& t = b.state_of(e.col);
      const int d1 = std::abs(t.n1 - s.n1), d2 = std::abs(t.n2 - s.n2), d3 = std::abs(t.n3 - s.n3);
      EXPECT_TRUE(d1 + d2 + d3 == 0 || d1 + d2 + d3 == 2);
    }
  }
}

TEST(Build, RejectsInvalidParams) {
  EXPECT_THROW(build_hamiltonian({0, 1.0, 1.0}), ConfigError);
  EXPECT_THROW(build_hamiltonian({5, -1.0, 1.0}), ConfigError);
  EXPECT_THROW(build_hamiltonian({5, 1.0, 0.0}), ConfigError);
}

TEST(Build, OneParticleCirculant) {
  auto h = build_hamiltonian({1, 0.0, 1.0});
  ASSERT_EQ(h.dim(), 3u);
  auto m = h.to_dense();
  const double t = m(0, 1);
  EXPECT_NEAR(m(0, 2), t, 1e-15);
  EXPECT_NEAR(m(1, 2), t, 1e-15);
  // Symmetric circulant with zero diagonal: eigenvalues 2t, -t, -t.
  auto s = spectrum(h, false);
  ASSERT_EQ(s.values.size(), 3u);
  EXPECT_NEAR(s.values[0], 2.0 * t, 1e-14);
  EXPECT_NEAR(s.values[1], -t, 1e-14);
  EXPECT_NEAR(s.values[2], -t, 1e-14);
  StateVector sym(h.basis(), {1.0, 1.0, 1.0});
  sym = normalize(sym);
  EXPECT_NEAR(s.values[0], expectation(h, sym), 1e-14);
}

TEST(Spectrum, OneParticleDoubletAtAnyLambda) {
  for (double lam : {0.0, 0.7, 4.0}) {
    auto s = spectrum(build_hamiltonian({1, lam, 1.0}), false);
    EXPECT_NEAR(s.values[1], s.values[2], 1e-14);
  }
}

TEST(Spectrum, GroundEnergyAtZeroCoupling) {
  auto s = spectrum(build_hamiltonian({20, 0.0, 1.0}), false);
  EXPECT_EQ(s.values.size(), 231u);
  EXPECT_NEAR(energy_per_kappa_n(s.values[0]), -1.911, 0.005 * 1.911);
}

TEST(Spectrum, TraceIdentityAndOrthonormality) {
  auto h = build_hamiltonian({10, 2.5, 1.0});
  auto s = spectrum(h, true);
  double sum = 0.0;
  for (double v : s.values) sum += v;
  EXPECT_NEAR(sum, h.trace(), 1e-8 * std::abs(h.trace()));
  for (std::size_t a = 0; a < s.vectors.size(); a += 7)
    for (std::size_t b = 0; b < s.vectors.size(); ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < h.dim(); ++i) d += s.vectors[a][i] * s.vectors[b][i];
      EXPECT_NEAR(d, a == b ? 1.0 : 0.0, 1e-10);
    }
}

TEST(Spectrum, TwoParticleJacobiReference) {
  for (double lam : {0.0, 0.5, 3.3, 7.0}) {
    auto h = build_hamiltonian({2, lam, 1.0});
    auto s = spectrum(h, false);
    auto ref = testing_support::jacobi_eigenvalues(h.to_dense());
    EXPECT_LT(testing_support::max_abs_diff(s.values, ref), 1e-10);
  }
}

TEST(Spectrum, NoonEnergyIsExact) {
  for (int n : {1, 5, 20, 33})
    for (double lam : {0.0, 0.5, 2.0, 5.0}) {
      auto h = build_hamiltonian({n, lam, 1.0});
      const double e = expectation(h, state_noon(h.basis(), 0.0, 0.0));
      EXPECT_NEAR(e, -lam / 3.0, 1e-12 * std::max(1.0, lam)) << n << " " << lam;
      EXPECT_NEAR(energy_per_kappa_n(e), -2.0 * lam / 3.0, 1e-12 * std::max(1.0, lam));
    }
}

TEST(Spectrum, VariationalBound) {
  for (double lam : {0.0, 1.0, 3.3, 5.0}) {
    auto h = build_hamiltonian({15, lam, 1.0});
    const double e0 = spectrum(h, false).values[0];
    EXPECT_LE(e0, expectation(h, state_noon(h.basis(), 0.0, 0.0)) + 1e-12);
    EXPECT_LE(e0, expectation(h, state_gaussian(h.basis())) + 1e-12);
  }
}

TEST(Spectrum, CommutesWithModeCycle) {
  for (int n : {1, 4, 11, 20}) {
    auto h = build_hamiltonian({n, 2.2, 1.0});
    double worst = 0.0;
    for (std::size_t i = 0; i < h.dim(); ++i) {
      StateVector e(h.basis());
      e[i] = 1.0;
      auto hp = h.apply(cycle_modes(e));
      auto ph = cycle_modes(h.apply(e));
      for (std::size_t j = 0; j < h.dim(); ++j) worst = std::max(worst, std::abs(hp[j] - ph[j]));
    }
    EXPECT_LE(worst, 1e-10) << n;
  }
}

TEST(GroundState, ConcentratedNearCentreAtZeroCoupling) {
  auto g = ground_state(build_hamiltonian({20, 0.0, 1.0}));
  std::size_t arg = 0;
  for (std::size_t i = 1; i < g.state.size(); ++i)
    if (std::norm(g.state[i]) > std::norm(g.state[arg])) arg = i;
  const auto& s = g.state.basis().state_of(arg);
  EXPECT_LE(std::abs(s.n1 - 7) + std::abs(s.n2 - 7), 2);
  EXPECT_LT(noon_fidelity(g.state), 0.05);
}

TEST(GroundState, EdgeDominatedPastTransition) {
  auto g = ground_state(build_hamiltonian({20, 3.305, 1.0}));
  EXPECT_GE(edge_population(g.state), 0.9);
}

TEST(GroundState, SuperpositionNearTransition) {
  const double edge = edge_population(ground_state(build_hamiltonian({20, kLambdaCrQuoted, 1.0})).state);
  EXPECT_GT(edge, 0.1);
  EXPECT_LT(edge, 0.9);
}

TEST(GroundState, ResidualAndPhaseConvention) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lam(0.0, 6.0);
  std::uniform_int_distribution<int> nn(1, 14);
  for (int t = 0; t < 25; ++t) {
    auto h = build_hamiltonian({nn(rng), lam(rng), 1.0});
    auto g = ground_state(h);
    EXPECT_LE(g.residual, 1e-9 * std::max(h.spectral_bound(), 1e-300));
    EXPECT_NEAR(norm(g.state), 1.0, 1e-12);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < g.state.size(); ++i)
      if (std::abs(g.state[i]) > std::abs(g.state[arg])) arg = i;
    EXPECT_GT(g.state[arg].real(), 0.0);
    EXPECT_NEAR(g.state[arg].imag(), 0.0, 1e-15);
  }
}

TEST(GroundState, LanczosAgreesWithDense) {
  auto h = build_hamiltonian({20, 2.0, 1.0});
  GroundStateOptions dense, krylov;
  dense.method = EigenMethod::Dense;
  krylov.method = EigenMethod::Lanczos;
  auto a = ground_state(h, dense), b = ground_state(h, krylov);
  EXPECT_NEAR(a.lambda0, b.lambda0, 1e-10);
  EXPECT_NEAR(std::abs(inner(a.state, b.state)), 1.0, 1e-8);
}

TEST(GroundState, DegeneratePairYieldsEvenCombination) {
  GroundStateOptions opt;
  opt.degeneracy_gap = 10.0;  // force the degenerate branch
  auto h = build_hamiltonian({6, 1.0, 1.0});
  auto g = ground_state(h, opt);
  ASSERT_TRUE(g.degenerate);
  ASSERT_TRUE(g.partner.has_value());
  EXPECT_NEAR(norm(g.state), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(g.state, cycle_modes(g.state))), 1.0, 1e-10);
}

TEST(Evolve, EigenvectorPicksUpPhase) {
  auto h = build_hamiltonian({8, 1.5, 1.0});
  auto g = ground_state(h);
  const double tau = 3.0;
  auto r = evolve(h, g.state, tau, 1e-10);
  const cplx want = std::polar(1.0, -g.lambda0 * tau);
  for (std::size_t i = 0; i < g.state.size(); ++i) EXPECT_NEAR(std::abs(r.state[i] - want * g.state[i]), 0.0, 1e-8);
}

TEST(Evolve, ConservesNormAndEnergy) {
  std::mt19937_64 rng(32);
  auto h = build_hamiltonian({20, 3.0, 1.0});
  auto psi = testing_support::random_state(h.basis(), rng);
  const double e0 = expectation(h, psi);
  auto out = evolve(h, psi, 10.0, 1e-9).state;
  EXPECT_NEAR(norm(out), 1.0, 1e-8);
  EXPECT_LT(std::abs(expectation(h, out) - e0), 1e-8);
}

TEST(Evolve, BackwardInverts) {
  std::mt19937_64 rng(33);
  auto h = build_hamiltonian({6, 2.0, 1.0});
  auto psi = testing_support::random_state(h.basis(), rng);
  auto back = evolve(h, evolve(h, psi, 2.0, 1e-11).state, -2.0, 1e-11).state;
  EXPECT_NEAR(std::abs(inner(psi, back)), 1.0, 1e-9);
}

TEST(Evolve, RejectsBadInput) {
  auto h = build_hamiltonian({3, 1.0, 1.0});
  EXPECT_THROW(evolve(h, state_noon(FockBasis3(4), 0, 0), 1.0), ConfigError);
  EXPECT_THROW(evolve(h, state_noon(h.basis(), 0, 0), 1.0, 0.0), ConfigError);
}

TEST(NoonFidelity, Examples) {
  FockBasis3 b(9);
  EXPECT_NEAR(noon_fidelity(state_noon(b, 0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(noon_fidelity(basis_ket(b, 9, 0)), 1.0 / 3.0, 1e-15);
}

TEST(LambdaCr, TwentyParticles) {
  auto cp = detect_lambda_cr(20, 3.0, 3.6, 1e-5);
  EXPECT_NEAR(cp.lambda_cr, kLambdaCrQuoted, 0.005 * kLambdaCrQuoted);
  EXPECT_LE(cp.hi - cp.lo, 1e-5);
  EXPECT_LT(cp.order_lo, 0.5);
  EXPECT_GT(cp.order_hi, 0.5);
  EXPECT_GT(ground_edge_population(20, cp.lambda_cr + 0.01), ground_edge_population(20, cp.lambda_cr - 0.01));
}

TEST(LambdaCr, NoCrossingAndBadBracket) {
  EXPECT_THROW(detect_lambda_cr(20, 0.0, 1.0, 1e-4), DomainError);
  EXPECT_THROW(detect_lambda_cr(20, 1.0, 1.0, 1e-4), ConfigError);
  EXPECT_THROW(detect_lambda_cr(20, 3.0, 3.6, 0.0), ConfigError);
}
