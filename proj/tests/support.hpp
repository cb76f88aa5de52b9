#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "solnet/fock.hpp"
#include "solnet/linalg.hpp"
#include "solnet/metrology.hpp"

namespace testing_support {

inline solnet::StateVector random_state(const solnet::FockBasis3& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  solnet::StateVector v(basis);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {g(rng), g(rng)};
  return solnet::normalize(std::move(v));
}

inline solnet::StateVector random_real_state(const solnet::FockBasis3& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  solnet::StateVector v(basis);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = g(rng);
  return solnet::normalize(std::move(v));
}

/// Cyclic Jacobi rotations; eigenvalues ascending. Reference solver only.
inline std::vector<double> jacobi_eigenvalues(solnet::Matrix a) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double binomial(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

/// Lossy QFI bound for a two-particle state by explicit enumeration of the ten
/// loss branches: each conditional state is built from scratch and its QFI is
/// taken by finite differences. Returns the bound and the number of branches.
inline std::pair<solnet::QfiMatrix, int> two_particle_bound(const solnet::StateVector& psi, double eta, int k) {
  using solnet::cplx;
  const int n = 2;
  solnet::QfiMatrix oracle(2);
  int branches = 0;
  for (int l1 = 0; l1 <= n; ++l1)
    for (int l2 = 0; l2 <= n - l1; ++l2)
      for (int l3 = 0; l3 <= n - l1 - l2; ++l3) {
        ++branches;
        const int lost = l1 + l2 + l3;
        solnet::FockBasis3 kept(n - lost);
        auto xi = [&](std::span<const double> chi) {
          std::vector<cplx> a(kept.dim());
          for (int n1 = 0; n1 <= n; ++n1)
            for (int n2 = 0; n1 + n2 <= n; ++n2) {
              const int n3 = n - n1 - n2;
              if (n1 < l1 || n2 < l2 || n3 < l3) continue;
              const double w = binomial(n1, l1) * binomial(n2, l2) * binomial(n3, l3) * std::pow(eta, n - lost) *
                               std::pow(1 - eta, lost);
              a[kept.index_of(n1 - l1, n2 - l2)] = psi.at(n1, n2) * std::sqrt(w) *
                                                   std::polar(1.0, chi[0] * solnet::ipow(n1, k) + chi[1] * solnet::ipow(n2, k));
            }
          return a;
        };
        const double zero[] = {0.0, 0.0};
        double p = 0.0;
        for (auto x : xi(zero)) p += std::norm(x);
        if (p == 0.0) continue;
        auto unit = [&](std::span<const double> chi) {
          auto a = xi(chi);
          for (auto& x : a) x /= std::sqrt(p);
          return a;
        };
        auto f = solnet::qfi_numeric(unit, zero, {1e-3 / solnet::ipow(n, k), 1e-10});
        for (std::size_t i = 0; i < 2; ++i)
          for (std::size_t j = 0; j < 2; ++j) oracle(i, j) += p * f(i, j);
      }
  return {oracle, branches};
}

/// Largest entry difference relative to the largest entry of `want`.
inline double max_rel(const solnet::QfiMatrix& got, const solnet::QfiMatrix& want) {
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < want.dim(); ++i)
    for (std::size_t j = 0; j < want.dim(); ++j) {
      scale = std::max(scale, std::abs(want(i, j)));
      diff = std::max(diff, std::abs(got(i, j) - want(i, j)));
    }
  return diff / scale;
}

}  // namespace testing_support
