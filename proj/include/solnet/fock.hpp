#pragma once

// Three-mode bosonic Fock space at fixed total particle number N.
//
// Basis kets |N1, N2, N3> with N3 = N - N1 - N2 are ordered
// lexicographically in (N1, N2):
//
//   (0,0), (0,1), ..., (0,N), (1,0), ..., (1,N-1), ..., (N,0)
//
// This order is frozen; every CSV written by the library follows it.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "solnet/error.hpp"

namespace solnet {

using cplx = std::complex<double>;

struct Occupation {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  friend bool operator==(const Occupation&, const Occupation&) = default;
};

class FockBasis3 {
 public:
  explicit FockBasis3(int total) : total_(total) {
    if (total < 0) throw ConfigError("FockBasis3: particle number must be non-negative");
    auto table = std::make_shared<std::vector<Occupation>>();
    table->reserve(dimension(total));
    for (int a = 0; a <= total; ++a)
      for (int b = 0; b <= total - a; ++b) table->push_back({a, b, total - a - b});
    states_ = std::move(table);
  }

  static constexpr std::size_t dimension(int total) {
    const auto n = static_cast<std::size_t>(total);
    return (n + 1) * (n + 2) / 2;
  }

  int particles() const { return total_; }
  std::size_t dim() const { return states_->size(); }

  bool contains(int n1, int n2) const {
    return n1 >= 0 && n2 >= 0 && n1 + n2 <= total_;
  }

  /// Linear index of |n1, n2, N-n1-n2>. No bounds check; see contains().
  std::size_t index_of(int n1, int n2) const {
    const auto a = static_cast<std::size_t>(n1);
    const auto n = static_cast<std::size_t>(total_);
    return a * (n + 1) - a * (a - 1) / 2 + static_cast<std::size_t>(n2);
  }

  const Occupation& state_of(std::size_t index) const { return (*states_)[index]; }
  std::span<const Occupation> states() const { return *states_; }

  friend bool operator==(const FockBasis3& a, const FockBasis3& b) { return a.total_ == b.total_; }

 private:
  int total_;
  std::shared_ptr<const std::vector<Occupation>> states_;
};

/// Complex amplitude table A_{N1,N2} over a FockBasis3.
class StateVector {
 public:
  explicit StateVector(FockBasis3 basis) : basis_(std::move(basis)), amp_(basis_.dim()) {}
  StateVector(FockBasis3 basis, std::vector<cplx> amplitudes)
      : basis_(std::move(basis)), amp_(std::move(amplitudes)) {
    if (amp_.size() != basis_.dim())
      throw ConfigError("StateVector: amplitude count does not match basis dimension");
  }

  const FockBasis3& basis() const { return basis_; }
  std::size_t size() const { return amp_.size(); }

  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }
  cplx& at(int n1, int n2) { return amp_[basis_.index_of(n1, n2)]; }
  const cplx& at(int n1, int n2) const { return amp_[basis_.index_of(n1, n2)]; }

  std::span<cplx> amplitudes() { return amp_; }
  std::span<const cplx> amplitudes() const { return amp_; }

  StateVector& operator*=(cplx s) {
    for (auto& a : amp_) a *= s;
    return *this;
  }
  friend StateVector operator*(cplx s, StateVector v) { return v *= s; }

 private:
  FockBasis3 basis_;
  std::vector<cplx> amp_;
};

inline void require_same_basis(const StateVector& a, const StateVector& b) {
  if (!(a.basis() == b.basis())) throw ConfigError("state vectors live on different bases");
}

/// <a|b>, antilinear in the first argument.
inline cplx inner(const StateVector& a, const StateVector& b) {
  require_same_basis(a, b);
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm(const StateVector& a) {
  double s = 0.0;
  for (const auto& x : a.amplitudes()) s += std::norm(x);
  return std::sqrt(s);
}

inline StateVector normalize(StateVector a) {
  const double n = norm(a);
  if (n == 0.0 || !std::isfinite(n)) throw NumericalError("normalize: zero or non-finite vector");
  a *= cplx(1.0 / n);
  return a;
}

inline StateVector basis_ket(const FockBasis3& basis, int n1, int n2) {
  if (!basis.contains(n1, n2)) throw ConfigError("basis_ket: occupation outside the basis");
  StateVector v(basis);
  v.at(n1, n2) = 1.0;
  return v;
}

/// (|N,0,0> + e^{i theta2}|0,N,0> + e^{i theta3}|0,0,N>)/sqrt(3).
/// For N = 0 the three kets coincide and the vacuum is returned with amplitude 1.
inline StateVector state_noon(const FockBasis3& basis, double theta2, double theta3) {
  StateVector v(basis);
  const int n = basis.particles();
  if (n == 0) {
    v[0] = 1.0;
    return v;
  }
  const double a = 1.0 / std::sqrt(3.0);
  v.at(n, 0) = a;
  v.at(0, n) = std::polar(a, theta2);
  v.at(0, 0) = std::polar(a, theta3);
  return v;
}

/// Discretized three-mode Gaussian (coherent-like) probe: amplitudes sqrt(p(N1,N2)) with
///   p ∝ exp[-9/(4N) (N1+N2-2N/3)^2 - 3/(4N) (N1-N2)^2],
/// renormalized over the simplex.
inline StateVector state_gaussian(const FockBasis3& basis) {
  const int n = basis.particles();
  if (n < 1) throw ConfigError("state_gaussian: requires N >= 1");
  const double nn = n;
  StateVector v(basis);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const auto& s = basis.state_of(i);
    const double sum = s.n1 + s.n2 - 2.0 * nn / 3.0;
    const double diff = s.n1 - s.n2;
    const double p = 9.0 / (2.0 * std::sqrt(3.0) * std::numbers::pi * nn) *
                     std::exp(-9.0 / (4.0 * nn) * sum * sum - 3.0 / (4.0 * nn) * diff * diff);
    v[i] = std::sqrt(p);
  }
  return normalize(std::move(v));
}

/// Mean occupation of each mode.
inline std::array<double, 3> mean_occupation(const StateVector& v) {
  std::array<double, 3> m{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = std::norm(v[i]);
    const auto& s = v.basis().state_of(i);
    m[0] += p * s.n1;
    m[1] += p * s.n2;
    m[2] += p * s.n3;
  }
  return m;
}

/// Cyclic relabeling of modes 1 -> 2 -> 3 -> 1: the particles of mode 1 move to mode 2, etc.
inline StateVector cycle_modes(const StateVector& v) {
  const auto& b = v.basis();
  StateVector out(b);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& s = b.state_of(i);
    out.at(s.n3, s.n1) = v[i];
  }
  return out;
}

}  // namespace solnet
