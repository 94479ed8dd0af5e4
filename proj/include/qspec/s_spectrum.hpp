#pragma once

// S-spectrum of a quaternionic matrix, the pseudo-resolvent Q_s(T) = T^2 - 2 Re(s) T + |s|^2 I,
// both S-resolvent operators and the resolvent-equation residual.
//
// The spectrum is read off the complex Schur form of chi(T): each eigensphere u + S v shows up as
// the conjugate pair u +- i v (a real eigenvalue shows up twice). For normal T the Schur vectors
// of a cluster are turned into an orthonormal family of right eigenvectors T y = y p with p in C_j^+.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "qspec/complex_schur.hpp"
#include "qspec/errors.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/report.hpp"

namespace qspec {

struct EigenSphere {
  Quaternion rep;                       ///< u + j v, v >= 0
  int multiplicity{0};
  std::optional<QMatrix> projection;    ///< only for normal T
  std::vector<QVector> vectors;         ///< orthonormal, T y = y rep; only for normal T
};

struct SSpectrum {
  ImaginaryUnit j;
  std::vector<EigenSphere> spheres;  ///< ascending in (Re rep, |Im rep|)
  bool normal{false};
  /// Set when a cluster of chi eigenvalues had odd size, which a quaternionic matrix cannot
  /// produce exactly; the multiplicity was rounded up.
  bool odd_cluster{false};
};

inline QMatrix pseudo_resolvent(const QMatrix& t, const Quaternion& s) {
  const std::size_t n = t.rows();
  QMatrix q = t * t - t * (2.0 * s.s0);
  const double s2 = norm2(s);
  for (std::size_t i = 0; i < n; ++i) q(i, i) += s2;
  return q;
}

inline constexpr double kResolventTol = 1e-8;

/// sigma_min(Q_s(T)) >= tol * max(1, ||T||^2).
inline bool in_s_resolvent_set(const QMatrix& t, const Quaternion& s, double tol = kResolventTol) {
  const double nt = operator_norm(t);
  return min_singular_value(pseudo_resolvent(t, s)) >= tol * std::max(1.0, nt * nt);
}

namespace detail {

inline Quaternion from_c_e1(const Complex& z) { return {z.real(), z.imag(), 0.0, 0.0}; }

/// Projects v against the orthonormal family twice and normalizes; returns the residual norm.
inline double orthonormalize_against(QVector& v, const std::vector<QVector>& basis) {
  const double before = vector_norm(v);
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : basis) {
      const Quaternion c = inner(v, u);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= u[i] * c;
    }
  const double after = vector_norm(v);
  if (after > 0.0)
    for (auto& x : v) x /= after;
  return before > 0.0 ? after / before : 0.0;
}

/// Right-multiplies y by a unit c in C_j so that the first sizeable entry has a positive
/// real C_j-component (or, failing that, a positive real coefficient on k = orthogonal_unit(j)).
inline void fix_phase(QVector& y, const ImaginaryUnit& j) {
  double mx = 0.0;
  for (const auto& x : y) mx = std::max(mx, norm(x));
  if (mx == 0.0) return;
  std::size_t piv = 0;
  while (norm(y[piv]) < 0.5 * mx) ++piv;
  const Quaternion k = orthogonal_unit(j);
  const Quaternion jq = j;
  const Quaternion x = y[piv];
  // x = z1 + z2 k with z1, z2 in C_j
  const Quaternion z2k = x - Quaternion(x.s0) - jq * dot4(x, jq);  // component orthogonal to C_j
  const Quaternion z1 = x - z2k;
  const Quaternion z2 = z2k * conj(k);
  const double vnorm = vector_norm(y);
  Quaternion c;
  if (norm(z1) > 1e-8 * vnorm) {
    c = conj(z1) / norm(z1);
  } else {
    c = z2 / norm(z2);
  }
  for (auto& v : y) v = v * c;
}

struct Cluster {
  std::vector<std::size_t> members;
  double re{0.0};
  double im{0.0};
};

inline std::vector<Cluster> cluster_eigenvalues(const std::vector<Complex>& ev, double g) {
  const std::size_t m = ev.size();
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      if (std::abs(ev[a].real() - ev[b].real()) <= g &&
          std::abs(std::abs(ev[a].imag()) - std::abs(ev[b].imag())) <= g)
        parent[find(a)] = find(b);
  std::vector<Cluster> out;
  std::vector<std::ptrdiff_t> slot(m, -1);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t r = find(a);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].members.push_back(a);
  }
  for (auto& c : out) {
    for (auto a : c.members) {
      c.re += ev[a].real();
      c.im += std::abs(ev[a].imag());
    }
    c.re /= static_cast<double>(c.members.size());
    c.im /= static_cast<double>(c.members.size());
  }
  std::sort(out.begin(), out.end(),
            [](const Cluster& a, const Cluster& b) { return a.re != b.re ? a.re < b.re : a.im < b.im; });
  return out;
}

}  // namespace detail

/// S-spectrum with spheres represented in C_j^+. Normality is decided with
/// is_normal(T, normal_tol); for non-normal T only reps and multiplicities are filled.
/// Throws ConvergenceError when the Schur iteration stalls.
inline SSpectrum s_spectrum(const QMatrix& t, const ImaginaryUnit& j = ImaginaryUnit(),
                            double normal_tol = kStructureTol) {
  if (!t.is_square()) throw DimensionError("s_spectrum: matrix is not square");
  SSpectrum out;
  out.j = j;
  const std::size_t n = t.rows();
  if (n == 0) return out;
  const double nt = operator_norm(t);
  out.normal = is_normal(t, normal_tol);

  const auto schur = complex_schur(chi_embed(t));
  std::vector<Complex> ev(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) ev[k] = schur.t(k, k);
  const double g = 1e-8 * std::max(1.0, nt);
  const double real_snap = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
                           std::max(1.0, nt);
  const auto clusters = detail::cluster_eigenvalues(ev, g);

  // a^{-1} e1 a = j, so y a carries eigenvalue u + e1 v to u + j v
  const Quaternion a = conj(rotation_between(ImaginaryUnit::e1(), j));

  for (const auto& c : clusters) {
    EigenSphere sp;
    const double v = c.im <= real_snap ? 0.0 : c.im;
    sp.rep = Quaternion(c.re) + Quaternion(j) * v;
    const std::size_t size = c.members.size();
    if (size % 2 != 0) out.odd_cluster = true;
    sp.multiplicity = static_cast<int>((size + 1) / 2);

    if (out.normal) {
      std::vector<QVector> basis;
      for (auto idx : c.members) {
        QVector x = chi_unvector(schur.z.column(idx));
        if (v > 0.0 && ev[idx].imag() < 0.0) x = scale_right(std::move(x), Quaternion::e2());
        if (detail::orthonormalize_against(x, basis) > 0.3) basis.push_back(std::move(x));
      }
      if (basis.size() != static_cast<std::size_t>(sp.multiplicity))
        throw ConsistencyError("s_spectrum: eigenspace dimension does not match the multiplicity");
      QMatrix proj(n, n);
      for (auto& y : basis) {
        y = scale_right(std::move(y), a);
        detail::fix_phase(y, j);
        proj += outer_self<Quaternion>(y);
      }
      sp.projection = std::move(proj);
      sp.vectors = std::move(basis);
    }
    out.spheres.push_back(std::move(sp));
  }
  return out;
}

/// S_L^{-1}(s, T) = -Q_s(T)^{-1} (T - conj(s) I). Throws SingularError for s in the S-spectrum.
inline QMatrix s_resolvent_left(const QMatrix& t, const Quaternion& s, double tol = kResolventTol) {
  if (!in_s_resolvent_set(t, s, tol)) throw SingularError("s_resolvent_left: s lies in the S-spectrum");
  const QMatrix shifted = t - scalar_matrix(t.rows(), conj(s));
  return -(inverse(pseudo_resolvent(t, s)) * shifted);
}

/// S_R^{-1}(s, T) = -(T - conj(s) I) Q_s(T)^{-1}.
inline QMatrix s_resolvent_right(const QMatrix& t, const Quaternion& s, double tol = kResolventTol) {
  if (!in_s_resolvent_set(t, s, tol)) throw SingularError("s_resolvent_right: s lies in the S-spectrum");
  const QMatrix shifted = t - scalar_matrix(t.rows(), conj(s));
  return -(shifted * inverse(pseudo_resolvent(t, s)));
}

struct ResidualReport {
  double lhs_norm{0.0};
  double rhs_norm{0.0};
  double residual{0.0};
};

/// S_R^{-1}(s,T) S_L^{-1}(p,T) against
/// [(S_R^{-1}(s,T) - S_L^{-1}(p,T)) p - conj(s) (S_R^{-1}(s,T) - S_L^{-1}(p,T))] (p^2 - 2 s0 p + |s|^2)^{-1}.
/// Throws DomainError when p lies on the sphere of s.
inline ResidualReport check_resolvent_equation(const QMatrix& t, const Quaternion& s, const Quaternion& p,
                                               double tol = kResolventTol) {
  const Quaternion factor = p * p - p * (2.0 * s.s0) + Quaternion(norm2(s));
  const double scale = std::max({1.0, norm2(s), norm2(p)});
  if (norm(factor) <= 1e-12 * scale) throw DomainError("check_resolvent_equation: p lies on the sphere of s");
  const QMatrix sr = s_resolvent_right(t, s, tol);
  const QMatrix sl = s_resolvent_left(t, p, tol);
  const QMatrix lhs = sr * sl;
  const QMatrix diff = sr - sl;
  const QMatrix rhs = scale_right(scale_right(diff, p) - scale_left(conj(s), diff), inverse(factor));
  return {residual_norm(lhs), residual_norm(rhs), residual_norm(lhs - rhs)};
}

/// |rep| <= ||T|| for every sphere, plus the location constraints implied by the class of T.
inline CheckReport spectrum_bound_check(const QMatrix& t, const Tolerance& tol = {}) {
  CheckReport rep;
  const double nt = operator_norm(t);
  const auto spec = s_spectrum(t);
  const auto cls = classify(t);
  const double bound = tol.bound(std::max(1.0, nt));
  double excess = 0.0;
  double max_im = 0.0;
  double max_re = 0.0;
  double min_re = std::numeric_limits<double>::infinity();
  double unit_dev = 0.0;
  for (const auto& sp : spec.spheres) {
    excess = std::max(excess, norm(sp.rep) - nt);
    max_im = std::max(max_im, sp.rep.imag_norm());
    max_re = std::max(max_re, std::abs(sp.rep.s0));
    min_re = std::min(min_re, sp.rep.s0);
    unit_dev = std::max(unit_dev, std::abs(norm(sp.rep) - 1.0));
  }
  rep.add("norm_bound_excess", excess, bound);
  if (cls.hermitian) {
    rep.add("hermitian_imag_part", max_im, bound);
    rep.add("hermitian_real_range_excess", max_re - nt, bound);
  }
  if (cls.positive) rep.add("positive_min_real", std::max(0.0, -min_re), bound);
  if (cls.anti_hermitian) rep.add("anti_hermitian_real_part", max_re, bound);
  if (cls.unitary) rep.add("unitary_modulus_deviation", unit_dev, bound);
  return rep;
}

}  // namespace qspec
