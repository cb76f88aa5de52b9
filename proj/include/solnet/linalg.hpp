#pragma once

// Real symmetric eigensolvers.
//
//  * symmetric_eigen: Householder reduction to tridiagonal form followed by
//    the implicit-shift QL iteration (tred2/tql2 lineage). Dense, O(n^3).
//  * lanczos_lowest: Lanczos with full reorthogonalization for a few of the
//    lowest eigenpairs of an operator given only by its action on vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "solnet/error.hpp"

namespace solnet {

/// Row-major dense square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * n_, n_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct EigenSystem {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]; empty if not requested
};

namespace detail {

// Householder tridiagonalization. On entry v holds the symmetric matrix; on exit
// it holds the accumulated orthogonal transform, d the diagonal and e the
// subdiagonal (e[0] = 0).
inline void tred2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e). If z is non-null its columns are
// rotated along, turning the tred2 transform into eigenvectors.
inline void tql2(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_iter = 60;
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iter) throw NumericalError("tql2: QL iteration failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (z) {
            for (std::size_t k = 0; k < n; ++k) {
              h = (*z)(k, ii + 1);
              (*z)(k, ii + 1) = s * (*z)(k, ii) + c * h;
              (*z)(k, ii) = c * (*z)(k, ii) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

inline EigenSystem sorted_system(const std::vector<double>& d, const Matrix* z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] < d[b]; });
  EigenSystem out;
  out.values.reserve(n);
  for (auto k : order) out.values.push_back(d[k]);
  if (z) {
    out.vectors.reserve(n);
    for (auto k : order) {
      std::vector<double> col(n);
      for (std::size_t r = 0; r < n; ++r) col[r] = (*z)(r, k);
      out.vectors.push_back(std::move(col));
    }
  }
  return out;
}

}  // namespace detail

/// All eigenvalues (ascending) of a symmetric tridiagonal matrix.
/// `sub` has n-1 entries.
inline EigenSystem tridiagonal_eigen(std::vector<double> diag, std::span<const double> sub,
                                     bool want_vectors) {
  const std::size_t n = diag.size();
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = sub[i - 1];
  if (!want_vectors) {
    detail::tql2(diag, e, nullptr);
    return detail::sorted_system(diag, nullptr);
  }
  Matrix z = Matrix::identity(n);
  detail::tql2(diag, e, &z);
  return detail::sorted_system(diag, &z);
}

/// Full spectrum of a dense symmetric matrix.
inline EigenSystem symmetric_eigen(Matrix a, bool want_vectors) {
  const std::size_t n = a.rows();
  if (n == 0) return {};
  std::vector<double> d(n), e(n);
  detail::tred2(a, d, e);
  detail::tql2(d, e, want_vectors ? &a : nullptr);
  return detail::sorted_system(d, want_vectors ? &a : nullptr);
}

struct LanczosOptions {
  double tol = 1e-12;            // residual bound, relative to the spectral scale
  std::size_t max_krylov = 600;  // basis cap; also capped by the dimension
  std::uint64_t seed = 0x5eed;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

/// Lowest `count` eigenpairs of a symmetric operator. Exactly degenerate
/// eigenvalues are resolved once only (single start vector).
inline EigenSystem lanczos_lowest(std::size_t dim, const LinearOperator& apply, std::size_t count,
                                  const LanczosOptions& opt = {}) {
  if (dim == 0 || count == 0) return {};
  count = std::min(count, dim);
  const std::size_t cap = std::min(dim, std::max(opt.max_krylov, count + 2));

  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;
  std::vector<double> w(dim);

  auto dot = [](std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  };
  auto orthogonalize = [&](std::vector<double>& x) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const double c = dot(q, x);
        for (std::size_t i = 0; i < dim; ++i) x[i] -= c * q[i];
      }
  };

  std::vector<double> v(dim);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& x : v) x = uni(rng);
  {
    const double nv = std::sqrt(dot(v, v));
    for (auto& x : v) x /= nv;
  }

  double scale = 0.0;
  EigenSystem ritz;
  for (std::size_t j = 0; j < cap; ++j) {
    basis.push_back(v);
    apply(basis.back(), w);
    const double a = dot(basis.back(), w);
    alpha.push_back(a);
    orthogonalize(w);
    const double b = std::sqrt(dot(w, w));
    scale = std::max({scale, std::abs(a), b});

    const bool exhausted = b <= 1e-13 * std::max(scale, 1.0) || j + 1 == cap;
    if (j + 1 >= count && (exhausted || (j + 1) % 5 == 0)) {
      ritz = tridiagonal_eigen(alpha, beta, true);
      bool converged = true;
      for (std::size_t k = 0; k < count; ++k) {
        if (std::abs(b * ritz.vectors[k][j]) > opt.tol * std::max(scale, 1.0)) converged = false;
      }
      if (converged || exhausted) {
        if (!converged && j + 1 < dim)
          throw NumericalError("lanczos: not converged within the Krylov basis cap");
        EigenSystem out;
        for (std::size_t k = 0; k < count && k < ritz.values.size(); ++k) {
          out.values.push_back(ritz.values[k]);
          std::vector<double> x(dim, 0.0);
          for (std::size_t m = 0; m <= j; ++m) {
            const double c = ritz.vectors[k][m];
            for (std::size_t i = 0; i < dim; ++i) x[i] += c * basis[m][i];
          }
          const double nx = std::sqrt(dot(x, x));
          for (auto& xi : x) xi /= nx;
          out.vectors.push_back(std::move(x));
        }
        return out;
      }
    }
    beta.push_back(b);
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / b;
  }
  throw NumericalError("lanczos: basis cap reached");
}

/// Trace of the inverse of a symmetric positive-definite matrix (row-major, d x d),
/// via Cholesky factorization and d pairs of triangular solves.
inline double trace_of_inverse_spd(std::span<const double> m, std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) diag_scale = std::max(diag_scale, std::abs(m[i * d + i]));
  for (std::size_t j = 0; j < d; ++j) {
    double s = m[j * d + j];
    for (std::size_t k = 0; k < j; ++k) s -= l[j * d + k] * l[j * d + k];
    if (!(s > 1e-14 * diag_scale))
      throw NumericalError("trace_of_inverse: matrix is singular or not positive definite");
    l[j * d + j] = std::sqrt(s);
    for (std::size_t i = j + 1; i < d; ++i) {
      double t = m[i * d + j];
      for (std::size_t k = 0; k < j; ++k) t -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = t / l[j * d + j];
    }
  }
  double trace = 0.0;
  std::vector<double> y(d), x(d);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      double t = (i == c) ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) t -= l[i * d + k] * y[k];
      y[i] = t / l[i * d + i];
    }
    for (std::size_t i = d; i-- > 0;) {
      double t = y[i];
      for (std::size_t k = i + 1; k < d; ++k) t -= l[k * d + i] * x[k];
      x[i] = t / l[i * d + i];
    }
    trace += x[c];
  }
  return trace;
}

}  // namespace solnet
