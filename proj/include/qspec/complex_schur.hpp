#pragma once

// Complex Schur decomposition M = Z T Z^* by Householder reduction to Hessenberg form followed
// by implicitly shifted single-shift QR with Wilkinson shifts and Givens bulge chasing.
// For a normal M the triangular factor is diagonal up to rounding, so the Schur vectors are
// eigenvectors.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include "qspec/dense.hpp"
#include "qspec/errors.hpp"

namespace qspec {

using Complex = std::complex<double>;
using CMatrix = DenseMatrix<Complex>;

struct ComplexSchur {
  CMatrix t;  ///< upper triangular
  CMatrix z;  ///< unitary, M = Z T Z^*
};

namespace detail {

/// Givens pair (c real, s complex) with [[c, s], [-conj(s), c]] (a, b)^T = (r, 0)^T.
struct Givens {
  double c{1.0};
  Complex s{0.0, 0.0};
};

inline Givens make_givens(const Complex& a, const Complex& b) {
  const double ab = std::abs(b);
  if (ab == 0.0) return {1.0, {0.0, 0.0}};
  const double aa = std::abs(a);
  if (aa == 0.0) return {0.0, {1.0, 0.0}};
  const double r = std::hypot(aa, ab);
  return {aa / r, (a / aa) * std::conj(b) / r};
}

/// Rows k, k+1, columns from..to-1: left-multiply by G.
inline void givens_rows(CMatrix& m, std::size_t k, const Givens& g, std::size_t from, std::size_t to) {
  for (std::size_t j = from; j < to; ++j) {
    const Complex x = m(k, j);
    const Complex y = m(k + 1, j);
    m(k, j) = g.c * x + g.s * y;
    m(k + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
}

/// Columns k, k+1, rows from..to-1: right-multiply by G^*.
inline void givens_cols(CMatrix& m, std::size_t k, const Givens& g, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    const Complex x = m(i, k);
    const Complex y = m(i, k + 1);
    m(i, k) = g.c * x + std::conj(g.s) * y;
    m(i, k + 1) = -g.s * x + g.c * y;
  }
}

inline void hessenberg_reduce(CMatrix& h, CMatrix& z) {
  const std::size_t n = h.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm = std::hypot(xnorm, std::abs(h(i, k)));
    if (xnorm == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex(1.0, 0.0);
    const Complex alpha = -phase * xnorm;
    std::vector<Complex> v(n, Complex{});
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm = std::hypot(vnorm, std::abs(v[i]));
    if (vnorm == 0.0) continue;
    for (auto& x : v) x /= vnorm;
    // H <- (I - 2 v v^*) H (I - 2 v v^*), Z <- Z (I - 2 v v^*)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * v[i] * s;
    }
    for (CMatrix* m : {&h, &z}) {
      for (std::size_t i = 0; i < n; ++i) {
        Complex s{};
        for (std::size_t j = k + 1; j < n; ++j) s += (*m)(i, j) * v[j];
        for (std::size_t j = k + 1; j < n; ++j) (*m)(i, j) -= 2.0 * s * std::conj(v[j]);
      }
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
  }
}

inline Complex wilkinson_shift(const Complex& a, const Complex& b, const Complex& c, const Complex& d) {
  const Complex half = 0.5 * (a - d);
  const Complex disc = std::sqrt(half * half + b * c);
  const Complex m1 = 0.5 * (a + d) + disc;
  const Complex m2 = 0.5 * (a + d) - disc;
  return std::abs(m1 - d) <= std::abs(m2 - d) ? m1 : m2;
}

}  // namespace detail

/// Throws ConvergenceError when an eigenvalue needs more than `max_iterations` QR sweeps.
inline ComplexSchur complex_schur(const CMatrix& m, int max_iterations = 100) {
  if (!m.is_square()) throw DimensionError("complex_schur: matrix is not square");
  const std::size_t n = m.rows();
  ComplexSchur out{m, CMatrix::identity(n)};
  CMatrix& h = out.t;
  CMatrix& z = out.z;
  if (n == 0) return out;
  detail::hessenberg_reduce(h, z);

  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  std::size_t hi = n - 1;
  int iter = 0;
  while (hi > 0) {
    // locate the start of the active unreduced block
    std::size_t lo = hi;
    while (lo > 0) {
      const double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (std::abs(h(lo, lo - 1)) <= eps * (s > 0.0 ? s : hnorm)) {
        h(lo, lo - 1) = Complex{};
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > max_iterations) throw ConvergenceError("complex QR iteration did not converge");

    Complex mu;
    if (iter % 11 == 0) {
      // exceptional shift breaks rare cycles
      mu = h(hi, hi) + Complex(std::abs(h(hi, hi - 1)), 0.0) * 1.5;
    } else {
      mu = detail::wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }

    Complex x = h(lo, lo) - mu;
    Complex y = h(lo + 1, lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const auto g = detail::make_givens(x, y);
      const std::size_t col_from = k > lo ? k - 1 : lo;
      detail::givens_rows(h, k, g, col_from, n);
      detail::givens_cols(h, k, g, 0, std::min(hi + 1, k + 3));
      detail::givens_cols(z, k, g, 0, n);
      if (k > lo) h(k + 1, k - 1) = Complex{};
      if (k + 1 < hi) {
        x = h(k + 1, k);
        y = h(k + 2, k);
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) h(i, j) = Complex{};
  return out;
}

}  // namespace qspec
