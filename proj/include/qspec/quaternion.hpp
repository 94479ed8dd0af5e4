#pragma once

// Quaternion scalars, the sphere of imaginary units and the slice planes C_j.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

#include "qspec/errors.hpp"

namespace qspec {

/// q = s0 + s1 e1 + s2 e2 + s3 e3 with e1 e2 = e3, e2 e3 = e1, e3 e1 = e2.
struct Quaternion {
  double s0{0.0};
  double s1{0.0};
  double s2{0.0};
  double s3{0.0};

  constexpr Quaternion() = default;
  constexpr Quaternion(double re) : s0(re) {}  // NOLINT: reals embed implicitly
  constexpr Quaternion(double a, double b, double c, double d) : s0(a), s1(b), s2(c), s3(d) {}

  static constexpr Quaternion e1() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion e2() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion e3() { return {0.0, 0.0, 0.0, 1.0}; }

  constexpr double real() const { return s0; }
  constexpr Quaternion imag() const { return {0.0, s1, s2, s3}; }
  double imag_norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }
  constexpr std::array<double, 4> components() const { return {s0, s1, s2, s3}; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    s0 += o.s0;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    s0 -= o.s0;
    s1 -= o.s1;
    s2 -= o.s2;
    s3 -= o.s3;
    return *this;
  }
  constexpr Quaternion& operator*=(double k) {
    s0 *= k;
    s1 *= k;
    s2 *= k;
    s3 *= k;
    return *this;
  }
  constexpr Quaternion& operator/=(double k) { return *this *= (1.0 / k); }
  constexpr Quaternion& operator*=(const Quaternion& o);

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator-(const Quaternion& a) { return {-a.s0, -a.s1, -a.s2, -a.s3}; }
constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator*(Quaternion a, double k) { return a *= k; }
constexpr Quaternion operator*(double k, Quaternion a) { return a *= k; }
constexpr Quaternion operator/(Quaternion a, double k) { return a /= k; }

/// Hamilton product.
constexpr Quaternion mul(const Quaternion& a, const Quaternion& b) {
  return {a.s0 * b.s0 - a.s1 * b.s1 - a.s2 * b.s2 - a.s3 * b.s3,
          a.s0 * b.s1 + a.s1 * b.s0 + a.s2 * b.s3 - a.s3 * b.s2,
          a.s0 * b.s2 - a.s1 * b.s3 + a.s2 * b.s0 + a.s3 * b.s1,
          a.s0 * b.s3 + a.s1 * b.s2 - a.s2 * b.s1 + a.s3 * b.s0};
}

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return mul(a, b); }
constexpr Quaternion& Quaternion::operator*=(const Quaternion& o) { return *this = mul(*this, o); }

constexpr Quaternion conj(const Quaternion& a) { return {a.s0, -a.s1, -a.s2, -a.s3}; }

constexpr double norm2(const Quaternion& a) {
  return a.s0 * a.s0 + a.s1 * a.s1 + a.s2 * a.s2 + a.s3 * a.s3;
}

inline double norm(const Quaternion& a) {
  // hypot-style scaling keeps |q| finite for huge components
  const double m = std::max({std::abs(a.s0), std::abs(a.s1), std::abs(a.s2), std::abs(a.s3)});
  if (m == 0.0 || !std::isfinite(m)) return m;
  const Quaternion b = a / m;
  return m * std::sqrt(norm2(b));
}

/// a^{-1} = conj(a) / |a|^2; throws DomainError for a = 0.
inline Quaternion inverse(const Quaternion& a) {
  const double n2 = norm2(a);
  if (n2 == 0.0) throw DomainError("inverse of the zero quaternion");
  return conj(a) / n2;
}

inline bool isfinite(const Quaternion& a) {
  return std::isfinite(a.s0) && std::isfinite(a.s1) && std::isfinite(a.s2) && std::isfinite(a.s3);
}

/// Euclidean inner product of the four components.
constexpr double dot4(const Quaternion& a, const Quaternion& b) {
  return a.s0 * b.s0 + a.s1 * b.s1 + a.s2 * b.s2 + a.s3 * b.s3;
}

inline double distance(const Quaternion& a, const Quaternion& b) { return norm(a - b); }

// Scalar traits shared with std::complex and double by the dense templates.
inline double magnitude(const Quaternion& a) { return norm(a); }
constexpr Quaternion conjugate(const Quaternion& a) { return conj(a); }
constexpr double real_part(const Quaternion& a) { return a.s0; }
inline Quaternion reciprocal(const Quaternion& a) { return inverse(a); }

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '[' << q.s0 << ", " << q.s1 << ", " << q.s2 << ", " << q.s3 << ']';
}

/// Element of the sphere S of purely imaginary unit quaternions, so u^2 = -1.
class ImaginaryUnit {
 public:
  /// Defaults to e1.
  constexpr ImaginaryUnit() : u_{0.0, 1.0, 0.0, 0.0} {}

  static constexpr ImaginaryUnit e1() { return ImaginaryUnit(); }
  static ImaginaryUnit e2() { return from_components(0.0, 1.0, 0.0); }
  static ImaginaryUnit e3() { return from_components(0.0, 0.0, 1.0); }

  /// Direction (x, y, z), normalized. Throws on the zero vector.
  static ImaginaryUnit from_components(double x, double y, double z) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("imaginary unit needs a nonzero direction");
    ImaginaryUnit j;
    j.u_ = Quaternion(0.0, x / n, y / n, z / n);
    return j;
  }

  /// Accepts q only if Re q = 0 and |q| = 1 within tol; the stored unit is renormalized.
  static ImaginaryUnit checked(const Quaternion& q, double tol = 1e-12) {
    if (std::abs(q.s0) > tol || std::abs(norm(q) - 1.0) > tol)
      throw DomainError("not a unit imaginary quaternion");
    return from_components(q.s1, q.s2, q.s3);
  }

  constexpr const Quaternion& value() const { return u_; }
  constexpr operator Quaternion() const { return u_; }  // NOLINT

  friend constexpr bool operator==(const ImaginaryUnit&, const ImaginaryUnit&) = default;

 private:
  Quaternion u_;
};

/// u + j v in the closed upper half plane C_j^+.
struct SlicePoint {
  double u{0.0};
  double v{0.0};
  ImaginaryUnit j;

  Quaternion embed() const { return Quaternion(u) + Quaternion(j) * v; }
};

/// Writes q = u + i v with v >= 0 and i in S. Real q gets i = default_j.
inline SlicePoint slice_split(const Quaternion& q, const ImaginaryUnit& default_j = ImaginaryUnit()) {
  const double v = q.imag_norm();
  if (v == 0.0) return {q.s0, 0.0, default_j};
  return {q.s0, v, ImaginaryUnit::from_components(q.s1, q.s2, q.s3)};
}

/// The point of the sphere of q that lies in C_j^+.
inline Quaternion sphere_representative(const Quaternion& q, const ImaginaryUnit& j) {
  return Quaternion(q.s0) + Quaternion(j) * q.imag_norm();
}

/// Distance from q to the sphere {u + i v : i in S}, v >= 0.
inline double distance_to_sphere(const Quaternion& q, double u, double v) {
  return std::hypot(q.s0 - u, q.imag_norm() - v);
}

/// a + b j for z = a + b i.
inline Quaternion from_slice(const std::complex<double>& z, const ImaginaryUnit& j) {
  return Quaternion(z.real()) + Quaternion(j) * z.imag();
}

/// Coordinates (Re q, <Im q, j>) of q in C_j; exact when q lies in C_j.
inline std::complex<double> to_slice(const Quaternion& q, const ImaginaryUnit& j) {
  return {q.s0, dot4(q, j.value())};
}

/// Unit a with a * from * a^{-1} = to. Antipodal units rotate about a fixed perpendicular axis.
inline Quaternion rotation_between(const ImaginaryUnit& from, const ImaginaryUnit& to) {
  const Quaternion f = from.value();
  const Quaternion t = to.value();
  const double c = dot4(f, t);
  const Quaternion cross{0.0, f.s2 * t.s3 - f.s3 * t.s2, f.s3 * t.s1 - f.s1 * t.s3,
                         f.s1 * t.s2 - f.s2 * t.s1};
  if (c > 1.0 - 1e-15 && norm(cross) < 1e-15) return Quaternion(1.0);
  Quaternion a = Quaternion(1.0 + c) + cross;
  const double n = norm(a);
  if (n < 1e-8) {
    // from = -to: any perpendicular unit p gives p f p^{-1} = -f
    const std::array<double, 3> fc{f.s1, f.s2, f.s3};
    std::size_t axis = 0;
    for (std::size_t k = 1; k < 3; ++k)
      if (std::abs(fc[k]) < std::abs(fc[axis])) axis = k;
    std::array<double, 3> e{0.0, 0.0, 0.0};
    e[axis] = 1.0;
    const double proj = e[0] * fc[0] + e[1] * fc[1] + e[2] * fc[2];
    return ImaginaryUnit::from_components(e[0] - proj * fc[0], e[1] - proj * fc[1],
                                          e[2] - proj * fc[2])
        .value();
  }
  return a / n;
}

/// Canonical unit k perpendicular to j (k j k^{-1} = -j). For j = e1 this is e2.
inline ImaginaryUnit orthogonal_unit(const ImaginaryUnit& j) {
  const std::array<double, 3> jc{j.value().s1, j.value().s2, j.value().s3};
  std::size_t axis = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 3; ++k) {
    if (std::abs(jc[k]) < best - 1e-15) {
      best = std::abs(jc[k]);
      axis = k;
    }
  }
  std::array<double, 3> e{0.0, 0.0, 0.0};
  e[axis] = 1.0;
  const double proj = jc[axis];
  return ImaginaryUnit::from_components(e[0] - proj * jc[0], e[1] - proj * jc[1], e[2] - proj * jc[2]);
}

/// Absolute-plus-relative comparison: |x| <= atol + rtol * scale.
struct Tolerance {
  double atol{1e-12};
  double rtol{1e-10};

  constexpr double bound(double scale) const { return atol + rtol * scale; }
  constexpr bool within(double residual, double scale) const { return residual <= bound(scale); }
  bool close(double a, double b, double scale = 1.0) const {
    return within(std::abs(a - b), std::max({scale, std::abs(a), std::abs(b)}));
  }
};

}  // namespace qspec
