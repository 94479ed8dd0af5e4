#pragma once

// Quaternionic matrices as right-linear operators on H^n.
//
// Vectors are columns, scalars act on the right (x alpha), and the inner product is
// <x, y> = sum conj(y_i) x_i, so <x alpha, y> = <x, y> alpha and <x, y alpha> = conj(alpha) <x, y>.
//
// The complex adjoint representation writes T = T1 + T2 e2 with T1, T2 having entries in
// C_{e1} (identified with C through e1 -> i) and sets
//
//   chi(T) = [[ T1,        T2       ],
//             [ -conj(T2), conj(T1) ]].
//
// chi is a real-algebra homomorphism with chi(T^*) = chi(T)^*, and x = x1 + x2 e2 embeds as the
// complex vector (x1, -conj(x2)) so that chi(T) v(x) = v(T x) and v(x lambda) = v(x) lambda for
// lambda in C_{e1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qspec/complex_schur.hpp"
#include "qspec/dense.hpp"
#include "qspec/errors.hpp"
#include "qspec/quaternion.hpp"

namespace qspec {

using QMatrix = DenseMatrix<Quaternion>;
using QVector = std::vector<Quaternion>;

inline QMatrix scalar_matrix(std::size_t n, const Quaternion& q) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = q;
  return m;
}

inline Quaternion inner(const QVector& x, const QVector& y) {
  return inner<Quaternion>(std::span<const Quaternion>(x), std::span<const Quaternion>(y));
}
inline double vector_norm(const QVector& x) { return vector_norm<Quaternion>(std::span<const Quaternion>(x)); }
inline QVector apply(const QMatrix& a, const QVector& x) {
  return apply<Quaternion>(a, std::span<const Quaternion>(x));
}

// ---- chi embedding ---------------------------------------------------------------------

inline Complex chi_first(const Quaternion& q) { return {q.s0, q.s1}; }
inline Complex chi_second(const Quaternion& q) { return {q.s2, q.s3}; }
inline Quaternion from_chi_pair(const Complex& z1, const Complex& z2) {
  return {z1.real(), z1.imag(), z2.real(), z2.imag()};
}

inline CMatrix chi_embed(const QMatrix& a) {
  const std::size_t n = a.rows();
  CMatrix m(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex t1 = chi_first(a(i, k));
      const Complex t2 = chi_second(a(i, k));
      m(i, k) = t1;
      m(i, k + n) = t2;
      m(i + n, k) = -std::conj(t2);
      m(i + n, k + n) = std::conj(t1);
    }
  return m;
}

/// Inverse of chi_embed. Throws DomainError when the block symmetry fails beyond
/// tol * max(1, max|M_ik|).
inline QMatrix chi_extract(const CMatrix& m, double tol = 1e-12) {
  if (!m.is_square() || m.rows() % 2 != 0) throw DimensionError("chi_extract: need a 2n x 2n matrix");
  const std::size_t n = m.rows() / 2;
  const double bound = tol * std::max(1.0, max_abs(m));
  QMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex t1 = m(i, k);
      const Complex t2 = m(i, k + n);
      if (std::abs(m(i + n, k) + std::conj(t2)) > bound || std::abs(m(i + n, k + n) - std::conj(t1)) > bound)
        throw DomainError("chi_extract: matrix lacks the symplectic block symmetry");
      a(i, k) = from_chi_pair(t1, t2);
    }
  return a;
}

/// v(x) = (x1, -conj(x2)) for x = x1 + x2 e2.
inline std::vector<Complex> chi_vector(const QVector& x) {
  const std::size_t n = x.size();
  std::vector<Complex> w(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = chi_first(x[i]);
    w[i + n] = -std::conj(chi_second(x[i]));
  }
  return w;
}

inline QVector chi_unvector(std::span<const Complex> w) {
  if (w.size() % 2 != 0) throw DimensionError("chi_unvector: odd length");
  const std::size_t n = w.size() / 2;
  QVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = from_chi_pair(w[i], -std::conj(w[i + n]));
  return x;
}

// ---- norms and classification ------------------------------------------------------------

/// sup_{|x| <= 1} |T x|, the largest singular value.
inline double operator_norm(const QMatrix& a) {
  if (a.rows() == 0) return 0.0;
  if (max_abs(a) == 0.0) return 0.0;
  return jacobi_svd(a).sigma.front();
}

inline double min_singular_value(const QMatrix& a) {
  if (a.rows() == 0) return 0.0;
  return jacobi_svd(a).sigma.back();
}

/// Residual size used by every verification: the Frobenius norm, an upper bound on the
/// operator norm.
inline double residual_norm(const QMatrix& a) { return frobenius_norm(a); }

struct Classification {
  bool hermitian{false};
  bool anti_hermitian{false};
  bool unitary{false};
  bool normal{false};
  bool positive{false};
};

inline constexpr double kStructureTol = 1e-8;

struct HermitianDecomposition;
inline HermitianDecomposition hermitian_eigen(const QMatrix& a, double tol);

inline bool is_normal(const QMatrix& a, double tol = kStructureTol) {
  const QMatrix h = adjoint(a);
  const double n = operator_norm(a);
  return operator_norm(a * h - h * a) <= tol * n * n;
}

/// Residual tests under tol: hermitian ||A - A*|| <= tol max(1, ||A||), unitary
/// ||A A* - I||, ||A* A - I|| <= tol, normal ||A A* - A* A|| <= tol ||A||^2,
/// positive = hermitian and min eigenvalue >= -tol max(1, ||A||).
inline Classification classify(const QMatrix& a, double tol = kStructureTol);

// ---- Hermitian eigenproblem -----------------------------------------------------------

struct HermitianDecomposition {
  std::vector<double> values;   ///< ascending
  std::vector<QVector> vectors;  ///< orthonormal, A v_k = v_k values[k]
};

/// Quaternionic cyclic Jacobi. Throws DomainError when A is not Hermitian within
/// tol * max(1, ||A||).
inline HermitianDecomposition hermitian_eigen(const QMatrix& a, double tol = kStructureTol) {
  if (!a.is_square()) throw DimensionError("hermitian_eigen: matrix is not square");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a - adjoint(a)) > tol * scale) throw DomainError("hermitian_eigen: matrix is not Hermitian");
  auto eig = jacobi_eigen(a);
  HermitianDecomposition out;
  out.values = std::move(eig.values);
  for (std::size_t k = 0; k < a.rows(); ++k) out.vectors.push_back(eig.vectors.column(k));
  return out;
}

/// sum_k v_k f(lambda_k) v_k^* for a Hermitian A.
template <class F>
QMatrix hermitian_function(const HermitianDecomposition& eig, F&& f) {
  const std::size_t n = eig.vectors.size();
  QMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k)
    out += outer_scaled<Quaternion>(eig.vectors[k], Quaternion(f(eig.values[k])));
  return out;
}

inline Classification classify(const QMatrix& a, double tol) {
  Classification c;
  const std::size_t n = a.rows();
  const QMatrix h = adjoint(a);
  const double norm_a = operator_norm(a);
  const double scale = std::max(1.0, norm_a);
  c.hermitian = operator_norm(a - h) <= tol * scale;
  c.anti_hermitian = operator_norm(a + h) <= tol * scale;
  const QMatrix id = QMatrix::identity(n);
  c.unitary = operator_norm(a * h - id) <= tol && operator_norm(h * a - id) <= tol;
  c.normal = operator_norm(a * h - h * a) <= tol * norm_a * norm_a;
  if (c.hermitian) {
    const auto eig = hermitian_eigen(a, tol);
    c.positive = eig.values.empty() || eig.values.front() >= -tol * scale;
  }
  return c;
}

/// Unique positive square root via the eigendecomposition. Throws DomainError on an eigenvalue
/// below -tol * max(1, ||A||).
inline QMatrix sqrt_positive(const QMatrix& a, double tol = kStructureTol) {
  const auto eig = hermitian_eigen(a, tol);
  const double scale = std::max(1.0, eig.values.empty() ? 0.0 : std::abs(eig.values.back()));
  if (!eig.values.empty() && eig.values.front() < -tol * scale)
    throw DomainError("sqrt_positive: matrix has a negative eigenvalue");
  return hermitian_function(eig, [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

/// |W| = (W^* W)^{1/2}, assembled from the singular value decomposition W V = U Sigma as
/// V Sigma V^*; this equals sqrt_positive(W^* W) without squaring the condition number.
inline QMatrix abs_op(const QMatrix& w) {
  const std::size_t n = w.rows();
  const auto svd = jacobi_svd(w);
  QMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const QVector vk = svd.v.column(k);
    out += outer_scaled<Quaternion>(vk, Quaternion(svd.sigma[k]));
  }
  return out;
}

}  // namespace qspec
