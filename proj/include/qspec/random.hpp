#pragma once

// Seeded generators for test matrices. Everything draws from a caller-owned std::mt19937_64 so
// that a single seed reproduces a whole run.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"

namespace qspec {

using Rng = std::mt19937_64;

/// Four independent standard normal components.
inline Quaternion random_quaternion(Rng& rng) {
  std::normal_distribution<double> n;
  const double a = n(rng);
  const double b = n(rng);
  const double c = n(rng);
  const double d = n(rng);
  return {a, b, c, d};
}

/// Uniform on the unit sphere of quaternions.
inline Quaternion random_unit_quaternion(Rng& rng) {
  for (;;) {
    const Quaternion q = random_quaternion(rng);
    const double n = norm(q);
    if (n > 1e-6) return q / n;
  }
}

/// Uniform on the sphere S of imaginary units.
inline ImaginaryUnit random_imaginary_unit(Rng& rng) {
  std::normal_distribution<double> n;
  for (;;) {
    const double x = n(rng);
    const double y = n(rng);
    const double z = n(rng);
    if (x * x + y * y + z * z > 1e-12) return ImaginaryUnit::from_components(x, y, z);
  }
}

inline QVector random_vector(std::size_t n, Rng& rng) {
  QVector x(n);
  for (auto& v : x) v = random_quaternion(rng);
  return x;
}

inline QMatrix random_matrix(std::size_t n, Rng& rng) {
  QMatrix a(n, n);
  for (auto& v : a.data()) v = random_quaternion(rng);
  return a;
}

/// Quaternionic modified Gram-Schmidt (two passes) on the columns of a Gaussian matrix.
inline QMatrix random_unitary(std::size_t n, Rng& rng) {
  for (;;) {
    const QMatrix g = random_matrix(n, rng);
    std::vector<QVector> cols;
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      QVector v = g.column(k);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : cols) {
          const Quaternion c = inner(v, u);
          for (std::size_t i = 0; i < n; ++i) v[i] -= u[i] * c;
        }
      const double nv = vector_norm(v);
      if (nv < 1e-8) ok = false;
      for (auto& x : v) x /= nv;
      cols.push_back(std::move(v));
    }
    if (!ok) continue;
    QMatrix u(n, n);
    for (std::size_t k = 0; k < n; ++k) u.set_column(k, cols[k]);
    return u;
  }
}

/// U diag(q) U^* with U unitary; the result is normal with right eigenvalues q_k.
inline QMatrix conjugate_diagonal(const QMatrix& u, const std::vector<Quaternion>& q) {
  return u * QMatrix::diagonal(q) * adjoint(u);
}

/// Normal matrix with eigenvalues drawn as `scale` times standard normal quaternions.
inline QMatrix random_normal(std::size_t n, Rng& rng, double scale = 1.0) {
  std::vector<Quaternion> d(n);
  for (auto& q : d) q = random_quaternion(rng) * scale;
  return conjugate_diagonal(random_unitary(n, rng), d);
}

inline QMatrix random_hermitian(std::size_t n, Rng& rng) {
  const QMatrix g = random_matrix(n, rng);
  return (g + adjoint(g)) * 0.5;
}

}  // namespace qspec
