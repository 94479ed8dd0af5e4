#pragma once

// Dense square/rectangular matrices over a *-algebra scalar (double, std::complex<double>,
// Quaternion) and the scalar-generic kernels built on them: products, adjoints, Gauss-Jordan
// inversion, two-sided Jacobi for Hermitian matrices, one-sided Jacobi SVD.
//
// Scalars multiply from the left or right explicitly; nothing here assumes commutativity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/quaternion.hpp"

namespace qspec {

inline double magnitude(double x) { return std::abs(x); }
inline double conjugate(double x) { return x; }
inline double real_part(double x) { return x; }
inline double reciprocal(double x) { return 1.0 / x; }

inline double magnitude(const std::complex<double>& z) { return std::abs(z); }
inline std::complex<double> conjugate(const std::complex<double>& z) { return std::conj(z); }
inline double real_part(const std::complex<double>& z) { return z.real(); }
inline std::complex<double> reciprocal(const std::complex<double>& z) { return 1.0 / z; }

template <class S>
class DenseMatrix {
 public:
  using scalar_type = S;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit DenseMatrix(std::size_t n) : DenseMatrix(n, n) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1.0);
    return m;
  }

  static DenseMatrix diagonal(std::span<const S> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// Dimension of a square matrix.
  std::size_t size() const { return rows_; }
  bool is_square() const { return rows_ == cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }

  std::vector<S> column(std::size_t j) const {
    std::vector<S> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  void set_column(std::size_t j, std::span<const S> c) {
    if (c.size() != rows_) throw DimensionError("column length mismatch");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(double k) {
    for (auto& x : data_) x *= k;
    return *this;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  void require_same_shape(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shapes differ");
  }

  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<S> data_;
};

template <class S>
DenseMatrix<S> operator+(DenseMatrix<S> a, const DenseMatrix<S>& b) {
  return a += b;
}
template <class S>
DenseMatrix<S> operator-(DenseMatrix<S> a, const DenseMatrix<S>& b) {
  return a -= b;
}
template <class S>
DenseMatrix<S> operator-(DenseMatrix<S> a) {
  return a *= -1.0;
}
template <class S>
DenseMatrix<S> operator*(DenseMatrix<S> a, double k) {
  return a *= k;
}
template <class S>
DenseMatrix<S> operator*(double k, DenseMatrix<S> a) {
  return a *= k;
}

template <class S>
DenseMatrix<S> operator*(const DenseMatrix<S>& a, const DenseMatrix<S>& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  DenseMatrix<S> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const S aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Every entry multiplied on the left by q.
template <class S>
DenseMatrix<S> scale_left(const S& q, DenseMatrix<S> a) {
  for (auto& x : a.data()) x = q * x;
  return a;
}

/// Every entry multiplied on the right by q.
template <class S>
DenseMatrix<S> scale_right(DenseMatrix<S> a, const S& q) {
  for (auto& x : a.data()) x = x * q;
  return a;
}

/// Conjugate transpose.
template <class S>
DenseMatrix<S> adjoint(const DenseMatrix<S>& a) {
  DenseMatrix<S> h(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = conjugate(a(i, j));
  return h;
}

template <class S>
double frobenius_norm(const DenseMatrix<S>& a) {
  double scale = 0.0;
  for (const auto& x : a.data()) scale = std::max(scale, magnitude(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (const auto& x : a.data()) {
    const double m = magnitude(x) / scale;
    s += m * m;
  }
  return scale * std::sqrt(s);
}

template <class S>
double max_abs(const DenseMatrix<S>& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, magnitude(x));
  return m;
}

// ---- vectors: <x, y> = sum conj(y_i) x_i, scalars act on the right -------------------------

template <class S>
S inner(std::span<const S> x, std::span<const S> y) {
  if (x.size() != y.size()) throw DimensionError("inner: length mismatch");
  S acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += conjugate(y[i]) * x[i];
  return acc;
}

template <class S>
double vector_norm(std::span<const S> x) {
  double s = 0.0;
  for (const auto& v : x) {
    const double m = magnitude(v);
    s += m * m;
  }
  return std::sqrt(s);
}

template <class S>
std::vector<S> apply(const DenseMatrix<S>& a, std::span<const S> x) {
  if (a.cols() != x.size()) throw DimensionError("apply: vector length does not match matrix");
  std::vector<S> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    S acc{};
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    y[i] = acc;
  }
  return y;
}

/// x * q componentwise.
template <class S>
std::vector<S> scale_right(std::vector<S> x, const S& q) {
  for (auto& v : x) v = v * q;
  return x;
}

/// Rank-one y y^*, i.e. the map x -> y <x, y>.
template <class S>
DenseMatrix<S> outer_self(std::span<const S> y) {
  DenseMatrix<S> p(y.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t l = 0; l < y.size(); ++l) p(i, l) = y[i] * conjugate(y[l]);
  return p;
}

/// y c y^*, i.e. the map x -> y c <x, y>.
template <class S>
DenseMatrix<S> outer_scaled(std::span<const S> y, const S& c) {
  DenseMatrix<S> p(y.size(), y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const S yc = y[i] * c;
    for (std::size_t l = 0; l < y.size(); ++l) p(i, l) = yc * conjugate(y[l]);
  }
  return p;
}

// ---- Gauss-Jordan ------------------------------------------------------------------------

/// Inverse by Gauss-Jordan with partial pivoting. Rows are combined by left multiplication, so
/// the result is a two-sided inverse over any division ring.
template <class S>
DenseMatrix<S> inverse(DenseMatrix<S> a) {
  if (!a.is_square()) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  DenseMatrix<S> inv = DenseMatrix<S>::identity(n);
  const double scale = max_abs(a);
  const double tiny = scale * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (magnitude(a(i, k)) > magnitude(a(piv, k))) piv = i;
    if (!(magnitude(a(piv, k)) > tiny)) throw SingularError("matrix is numerically singular");
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(k, j), a(piv, j));
        std::swap(inv(k, j), inv(piv, j));
      }
    const S r = reciprocal(a(k, k));
    for (std::size_t j = 0; j < n; ++j) {
      a(k, j) = r * a(k, j);
      inv(k, j) = r * inv(k, j);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const S f = a(i, k);
      if (magnitude(f) == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

// ---- Jacobi ------------------------------------------------------------------------------

namespace detail {

/// Rotation diagonalizing the Hermitian 2x2 block [[app, b], [conj(b), aqq]]: the columns
/// (c, w s) and (-s, w c) with w = conj(b)/|b| are its eigenvectors.
struct JacobiRotation {
  double c{1.0};
  double s{0.0};
};

inline JacobiRotation jacobi_angle(double app, double aqq, double abs_b) {
  const double zeta = (app - aqq) / (2.0 * abs_b);
  const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  return {c, t * c};
}

/// Columns p, q of m replaced by m G with G = [[c, -s], [w s, w c]].
template <class S>
void rotate_columns(DenseMatrix<S>& m, std::size_t p, std::size_t q, const JacobiRotation& r,
                    const S& w) {
  const S ws = w * r.s;
  const S wc = w * r.c;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const S xp = m(i, p);
    const S xq = m(i, q);
    m(i, p) = xp * r.c + xq * ws;
    m(i, q) = xp * (-r.s) + xq * wc;
  }
}

/// Rows p, q of m replaced by G^* m.
template <class S>
void rotate_rows_adjoint(DenseMatrix<S>& m, std::size_t p, std::size_t q, const JacobiRotation& r,
                         const S& w) {
  const S wbar = conjugate(w);
  const S sw = wbar * r.s;
  const S cw = wbar * r.c;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const S xp = m(p, j);
    const S xq = m(q, j);
    m(p, j) = r.c * xp + sw * xq;
    m(q, j) = (-r.s) * xp + cw * xq;
  }
}

template <class S>
double offdiag_norm(const DenseMatrix<S>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += magnitude(a(i, j)) * magnitude(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

template <class S>
struct HermitianEigen {
  std::vector<double> values;  ///< ascending
  DenseMatrix<S> vectors;      ///< column k pairs with values[k]: A v = v lambda
};

/// Cyclic two-sided Jacobi for a Hermitian matrix. Only the Hermitian part of `a` is used.
template <class S>
HermitianEigen<S> jacobi_eigen(const DenseMatrix<S>& input, int max_sweeps = 100) {
  if (!input.is_square()) throw DimensionError("jacobi_eigen: matrix is not square");
  const std::size_t n = input.rows();
  DenseMatrix<S> a = input;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = S(real_part(a(i, i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const S h = (a(i, j) + conjugate(a(j, i))) * 0.5;
      a(i, j) = h;
      a(j, i) = conjugate(h);
    }
  }
  DenseMatrix<S> v = DenseMatrix<S>::identity(n);
  const double scale = frobenius_norm(a);
  const double eps = std::numeric_limits<double>::epsilon();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (detail::offdiag_norm(a) <= eps * 1e-2 * scale) break;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double ab = magnitude(a(p, q));
        const double app = real_part(a(p, p));
        const double aqq = real_part(a(q, q));
        if (ab == 0.0 || ab <= eps * 1e-3 * std::sqrt(std::abs(app * aqq)) + 1e-300) continue;
        const S w = conjugate(a(p, q)) * (1.0 / ab);
        const auto r = detail::jacobi_angle(app, aqq, ab);
        detail::rotate_columns(a, p, q, r, w);
        detail::rotate_rows_adjoint(a, p, q, r, w);
        detail::rotate_columns(v, p, q, r, w);
        a(p, q) = S{};
        a(q, p) = S{};
        a(p, p) = S(real_part(a(p, p)));
        a(q, q) = S(real_part(a(q, q)));
        rotated = true;
      }
    if (!rotated) break;
  }
  if (sweep == max_sweeps && detail::offdiag_norm(a) > 1e-10 * std::max(scale, 1e-300))
    throw ConvergenceError("Hermitian Jacobi did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = real_part(a(i, i));
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return d[x] < d[y]; });
  HermitianEigen<S> out{std::vector<double>(n), DenseMatrix<S>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

template <class S>
struct SvdResult {
  std::vector<double> sigma;  ///< descending
  DenseMatrix<S> u;           ///< left singular vectors (columns); zero columns for sigma = 0
  DenseMatrix<S> v;           ///< right singular vectors (columns), unitary
};

/// One-sided Jacobi SVD of a square matrix: A V = U diag(sigma). Singular values carry
/// high relative accuracy, which the bounded transform relies on at large norms.
template <class S>
SvdResult<S> jacobi_svd(const DenseMatrix<S>& input, int max_sweeps = 100) {
  if (!input.is_square()) throw DimensionError("jacobi_svd: matrix is not square");
  const std::size_t n = input.rows();
  DenseMatrix<S> a = input;
  DenseMatrix<S> v = DenseMatrix<S>::identity(n);
  const double eps = std::numeric_limits<double>::epsilon();
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        S gamma{};
        for (std::size_t i = 0; i < n; ++i) {
          alpha += magnitude(a(i, p)) * magnitude(a(i, p));
          beta += magnitude(a(i, q)) * magnitude(a(i, q));
          gamma += conjugate(a(i, p)) * a(i, q);
        }
        const double g = magnitude(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        const S w = conjugate(gamma) * (1.0 / g);
        const auto r = detail::jacobi_angle(alpha, beta, g);
        detail::rotate_columns(a, p, q, r, w);
        detail::rotate_columns(v, p, q, r, w);
        rotated = true;
      }
    if (!rotated) break;
  }
  if (sweep == max_sweeps) throw ConvergenceError("one-sided Jacobi SVD did not converge");

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = a.column(j);
    sig[j] = vector_norm<S>(col);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sig[x] > sig[y]; });
  SvdResult<S> out{std::vector<double>(n), DenseMatrix<S>(n, n), DenseMatrix<S>(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sig[j];
    for (std::size_t i = 0; i < n; ++i) {
      out.v(i, k) = v(i, j);
      out.u(i, k) = sig[j] > 0.0 ? a(i, j) * (1.0 / sig[j]) : S{};
    }
  }
  return out;
}

}  // namespace qspec
