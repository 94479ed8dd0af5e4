#pragma once

// Slice functions f(u + i v) = alpha(u, v) + i beta(u, v) and the atomic functional calculi:
// continuous, polynomial approximation in (A, B), simple, B_infinity, inversion, push-forward.
//
// Values on C_j are carried as std::complex<double> with the imaginary unit standing for j.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"

namespace qspec {

enum class SliceKind {
  intrinsic,     ///< alpha, beta real valued
  slice_valued,  ///< alpha, beta with values in C_j
};

struct SliceFunction {
  using Component = std::function<Complex(double, double)>;
  Component alpha;
  Component beta;
  SliceKind kind{SliceKind::intrinsic};

  /// alpha(u, v) + i beta(u, v) in C_j; may be infinite or NaN where f is undefined.
  Complex operator()(double u, double v) const { return alpha(u, v) + Complex(0.0, 1.0) * beta(u, v); }
};

/// Builds an intrinsic function from a complex function h that is real on the real axis and
/// commutes with conjugation: alpha = Re h(u + i v), beta = Im h(u + i v).
inline SliceFunction intrinsic_from_complex(std::function<Complex(Complex)> h) {
  auto shared = std::make_shared<std::function<Complex(Complex)>>(std::move(h));
  return {[shared](double u, double v) { return Complex((*shared)({u, v}).real(), 0.0); },
          [shared](double u, double v) { return Complex((*shared)({u, v}).imag(), 0.0); }, SliceKind::intrinsic};
}

/// Throws InvalidFunctionError when alpha(u, v) != alpha(u, -v) or beta(u, v) != -beta(u, -v)
/// beyond 1e-12 relative at the given points; non-finite samples are skipped.
inline void validate_slice_function(const SliceFunction& f, const std::vector<std::pair<double, double>>& points) {
  for (const auto& [u, v] : points) {
    const Complex ap = f.alpha(u, v);
    const Complex am = f.alpha(u, -v);
    const Complex bp = f.beta(u, v);
    const Complex bm = f.beta(u, -v);
    const auto bad = [](Complex x, Complex y) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || !std::isfinite(y.real()) ||
          !std::isfinite(y.imag()))
        return false;
      return std::abs(x - y) > 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    if (bad(ap, am)) throw InvalidFunctionError("slice function: alpha is not even in v");
    if (bad(bp, -bm)) throw InvalidFunctionError("slice function: beta is not odd in v");
    if (f.kind == SliceKind::intrinsic && (std::abs(ap.imag()) > 0.0 || std::abs(bp.imag()) > 0.0))
      throw InvalidFunctionError("slice function: intrinsic components must be real");
  }
}

inline const std::vector<std::pair<double, double>>& default_symmetry_samples() {
  static const std::vector<std::pair<double, double>> pts{{-1.3, 0.7}, {0.4, 2.1}, {2.5, 0.3}, {0.0, 1.0}};
  return pts;
}

/// f(q) = alpha(u, v) + i beta(u, v) for q = u + i v, i the unit of q (j for real q).
inline Quaternion eval_slice(const SliceFunction& f, const Quaternion& q, const ImaginaryUnit& j = ImaginaryUnit()) {
  const SlicePoint sp = slice_split(q, j);
  validate_slice_function(f, {{sp.u, sp.v}});
  validate_slice_function(f, default_symmetry_samples());
  const Complex a = f.alpha(sp.u, sp.v);
  const Complex b = f.beta(sp.u, sp.v);
  if (f.kind == SliceKind::intrinsic) return Quaternion(a.real()) + Quaternion(sp.j) * b.real();
  return from_slice(a, j) + Quaternion(sp.j) * from_slice(b, j);
}

// ---- built-in functions -------------------------------------------------------------------

namespace slice {

inline SliceFunction identity() {
  return {[](double u, double) { return Complex(u); }, [](double, double v) { return Complex(v); }};
}
inline SliceFunction constant(double c) {
  return {[c](double, double) { return Complex(c); }, [](double, double) { return Complex(0.0); }};
}
/// u + i v -> u
inline SliceFunction real_part() {
  return {[](double u, double) { return Complex(u); }, [](double, double) { return Complex(0.0); }};
}
/// u + i v -> i v
inline SliceFunction imag_part() {
  return {[](double, double) { return Complex(0.0); }, [](double, double v) { return Complex(v); }};
}
inline SliceFunction square() {
  return {[](double u, double v) { return Complex(u * u - v * v); }, [](double u, double v) { return Complex(2.0 * u * v); }};
}
/// Principal square root; undefined (NaN) on the negative real axis, where no intrinsic
/// continuous choice exists.
inline SliceFunction sqrt() {
  auto root = [](double u, double v) {
    if (v == 0.0 && u < 0.0) return Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    const Complex r = std::sqrt(Complex(u, std::abs(v)));
    return Complex(r.real(), v < 0.0 ? -r.imag() : r.imag());
  };
  return {[root](double u, double v) { return Complex(root(u, v).real()); },
          [root](double u, double v) { return Complex(root(u, v).imag()); }};
}
/// exp(Re p)
inline SliceFunction exp_re() {
  return {[](double u, double) { return Complex(std::exp(u)); }, [](double, double) { return Complex(0.0); }};
}
/// 1/p, infinite at 0.
inline SliceFunction inv() {
  auto r = [](double u, double v) {
    const double d = u * u + v * v;
    if (d == 0.0) return Complex(std::numeric_limits<double>::infinity(), 0.0);
    return Complex(u / d, -v / d);
  };
  return {[r](double u, double v) { return Complex(r(u, v).real()); },
          [r](double u, double v) {
            const Complex z = r(u, v);
            return Complex(std::isinf(z.real()) ? 0.0 : z.imag());
          }};
}
/// |p|^2
inline SliceFunction norm2() {
  return {[](double u, double v) { return Complex(u * u + v * v); }, [](double, double) { return Complex(0.0); }};
}
/// exp(p)
inline SliceFunction exp() {
  return intrinsic_from_complex([](Complex z) { return std::exp(z); });
}
/// sum_k c_k p^k with real coefficients.
inline SliceFunction real_polynomial(std::vector<double> coeffs) {
  return intrinsic_from_complex([coeffs = std::move(coeffs)](Complex z) {
    Complex acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
  });
}

inline SliceFunction sum(SliceFunction f, SliceFunction g) {
  const SliceKind k = f.kind == SliceKind::intrinsic && g.kind == SliceKind::intrinsic ? SliceKind::intrinsic
                                                                                       : SliceKind::slice_valued;
  return {[f, g](double u, double v) { return f.alpha(u, v) + g.alpha(u, v); },
          [f, g](double u, double v) { return f.beta(u, v) + g.beta(u, v); }, k};
}

/// Pointwise product on C_j: (a1 + i b1)(a2 + i b2) = a1 a2 - b1 b2 + i (a1 b2 + b1 a2).
inline SliceFunction product(SliceFunction f, SliceFunction g) {
  const SliceKind k = f.kind == SliceKind::intrinsic && g.kind == SliceKind::intrinsic ? SliceKind::intrinsic
                                                                                       : SliceKind::slice_valued;
  return {[f, g](double u, double v) { return f.alpha(u, v) * g.alpha(u, v) - f.beta(u, v) * g.beta(u, v); },
          [f, g](double u, double v) { return f.alpha(u, v) * g.beta(u, v) + f.beta(u, v) * g.alpha(u, v); }, k};
}

/// conj f = alpha - i beta for intrinsic f.
inline SliceFunction conjugate(SliceFunction f) {
  if (f.kind != SliceKind::intrinsic) throw InvalidFunctionError("conjugate: only intrinsic functions");
  return {f.alpha, [f](double u, double v) { return -f.beta(u, v); }, SliceKind::intrinsic};
}

/// g o f for intrinsic f; g is evaluated at the C_j value of f, continued to v < 0 by symmetry.
inline SliceFunction compose(SliceFunction g, SliceFunction f) {
  auto h = [f, g](double u, double v) {
    const Complex z = f(u, v);
    return g(z.real(), z.imag());
  };
  return {[h](double u, double v) { return Complex(h(u, v).real()); },
          [h](double u, double v) { return Complex(h(u, v).imag()); },
          f.kind == SliceKind::intrinsic && g.kind == SliceKind::intrinsic ? SliceKind::intrinsic
                                                                           : SliceKind::slice_valued};
}

}  // namespace slice

// ---- continuous calculus ------------------------------------------------------------------

/// f(p_k) in C_j for every atom; null atoms get whatever f gives, possibly non-finite.
inline std::vector<Complex> atom_values(const SpectralMeasure& e, const SliceFunction& f) {
  std::vector<Complex> vals;
  vals.reserve(e.atoms.size());
  for (const auto& a : e.atoms) {
    const Complex z = to_slice(a.p, e.j);
    vals.push_back(f(z.real(), z.imag()));
  }
  return vals;
}

inline bool is_finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// sum_k y_k c_k y_k^* with c_k = values[k] read in C_j. Throws DomainError when a value on a
/// non-null atom is not finite.
inline QMatrix calc_values(const SpectralMeasure& e, const std::vector<Complex>& values) {
  if (values.size() != e.atoms.size()) throw DimensionError("calc_values: one value per atom required");
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!e.atoms[k].basis_index.empty() && !is_finite(values[k]))
      throw DomainError("function is undefined on an atom of nonzero measure");
  return integrate(e, [&](std::size_t k) { return from_slice(values[k], e.j); });
}

/// f(T) = int f(p) dE(p).
inline QMatrix calc_continuous(const SpectralMeasure& e, const SliceFunction& f) {
  validate_slice_function(f, default_symmetry_samples());
  return calc_values(e, atom_values(e, f));
}

/// f0(T) = sum y alpha y^*, f1(T) = sum y beta y^* for intrinsic f, so f(T) = f0(T) + J f1(T).
inline std::pair<QMatrix, QMatrix> calc_components(const SpectralMeasure& e, const SliceFunction& f) {
  if (f.kind != SliceKind::intrinsic) throw InvalidFunctionError("calc_components: only intrinsic functions");
  std::vector<Complex> a;
  std::vector<Complex> b;
  for (const auto& atom : e.atoms) {
    const Complex z = to_slice(atom.p, e.j);
    a.push_back(f.alpha(z.real(), z.imag()).real());
    b.push_back(f.beta(z.real(), z.imag()).real());
  }
  return {calc_values(e, a), calc_values(e, b)};
}

// ---- polynomial approximation -------------------------------------------------------------

namespace detail {

struct Interval {
  double center{0.0};
  double half{1.0};
  double to_unit(double x) const { return (x - center) / half; }
  double from_unit(double t) const { return center + half * t; }
};

inline Interval bounding_interval(double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double center = 0.5 * (hi + lo);
  if (!(half > 1e-12 * std::max(1.0, std::abs(center)))) return {center, 1.0};
  return {center, half};
}

/// Chebyshev coefficients c[a][b] of the degree-(N-1) tensor interpolant of g on [-1,1]^2 at
/// first-kind nodes.
inline std::vector<std::vector<double>> chebyshev_coefficients(const std::function<double(double, double)>& g,
                                                               std::size_t nodes) {
  const std::size_t n = nodes;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k)
    x[k] = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
  // tk[a][k] = T_a(x_k)
  std::vector<std::vector<double>> tk(n, std::vector<double>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < n; ++k)
      tk[a][k] = std::cos(static_cast<double>(a) * std::numbers::pi * (static_cast<double>(k) + 0.5) /
                          static_cast<double>(n));
  std::vector<std::vector<double>> vals(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) vals[k][l] = g(x[k], x[l]);
  std::vector<std::vector<double>> half(n, std::vector<double>(n, 0.0));  // half[a][l]
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < n; ++k) {
      const double w = tk[a][k];
      for (std::size_t l = 0; l < n; ++l) half[a][l] += w * vals[k][l];
    }
  std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
  const double nn = static_cast<double>(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += half[a][l] * tk[b][l];
      const double wa = a == 0 ? 1.0 : 2.0;
      const double wb = b == 0 ? 1.0 : 2.0;
      c[a][b] = s * wa * wb / (nn * nn);
    }
  return c;
}

inline double chebyshev_eval(const std::vector<std::vector<double>>& c, double s, double t) {
  const std::size_t n = c.size();
  std::vector<double> ts(n);
  std::vector<double> tt(n);
  for (std::size_t k = 0; k < n; ++k) {
    ts[k] = k == 0 ? 1.0 : k == 1 ? s : 2.0 * s * ts[k - 1] - ts[k - 2];
    tt[k] = k == 0 ? 1.0 : k == 1 ? t : 2.0 * t * tt[k - 1] - tt[k - 2];
  }
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) acc += c[a][b] * ts[a] * tt[b];
  return acc;
}

/// Chebyshev matrices T_0(X) .. T_{n-1}(X) for a Hermitian X with spectrum in [-1, 1].
inline std::vector<QMatrix> chebyshev_powers(const QMatrix& x, std::size_t n) {
  std::vector<QMatrix> out;
  out.reserve(n);
  const std::size_t dim = x.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0) out.push_back(QMatrix::identity(dim));
    else if (k == 1) out.push_back(x);
    else out.push_back(x * out[k - 1] * 2.0 - out[k - 2]);
  }
  return out;
}

inline QMatrix chebyshev_matrix(const std::vector<std::vector<double>>& c, const std::vector<QMatrix>& ta,
                                const std::vector<QMatrix>& tb) {
  const std::size_t n = c.size();
  const std::size_t dim = ta.front().rows();
  QMatrix out(dim, dim);
  for (std::size_t b = 0; b < n; ++b) {
    QMatrix inner_sum(dim, dim);
    for (std::size_t a = 0; a < n; ++a)
      if (c[a][b] != 0.0) inner_sum += ta[a] * c[a][b];
    out += inner_sum * tb[b];
  }
  return out;
}

}  // namespace detail

struct PolyApproxResult {
  QMatrix value;
  std::size_t degree{0};     ///< per variable
  double atom_error{0.0};    ///< max over atoms of |p(u, v) - f(u + j v)|
};

inline constexpr std::size_t kMaxChebyshevDegree = 256;

/// f0(A, B) + J f1(A, B) with f0, f1 tensor Chebyshev interpolants of alpha, beta on the bounding
/// box of the atoms; the degree doubles from 1 until the error at the atoms is at most eps / 4.
/// Throws ConvergenceError past degree 256 and InvalidFunctionError for non-intrinsic f.
inline PolyApproxResult calc_poly_approx(const QMatrix& t, const SliceFunction& f, double eps,
                                         const ImaginaryUnit& j = ImaginaryUnit()) {
  if (f.kind != SliceKind::intrinsic) throw InvalidFunctionError("calc_poly_approx: f must be intrinsic");
  if (!(eps > 0.0)) throw DomainError("calc_poly_approx: eps must be positive");
  validate_slice_function(f, default_symmetry_samples());
  const auto e = spectral_measure(t, j);
  const auto d = decompose_TABJ(t, j);
  std::vector<std::pair<double, double>> pts;
  for (const auto& a : e.atoms) pts.emplace_back(a.p.s0, a.p.imag_norm());
  double ulo = pts.front().first, uhi = ulo, vlo = pts.front().second, vhi = vlo;
  for (const auto& [u, v] : pts) {
    ulo = std::min(ulo, u);
    uhi = std::max(uhi, u);
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  const auto iu = detail::bounding_interval(ulo, uhi);
  const auto iv = detail::bounding_interval(vlo, vhi);
  auto fa = [&](double s, double r) { return f.alpha(iu.from_unit(s), iv.from_unit(r)).real(); };
  auto fb = [&](double s, double r) { return f.beta(iu.from_unit(s), iv.from_unit(r)).real(); };

  for (std::size_t degree = 1; degree <= kMaxChebyshevDegree; degree *= 2) {
    const auto ca = detail::chebyshev_coefficients(fa, degree + 1);
    const auto cb = detail::chebyshev_coefficients(fb, degree + 1);
    double err = 0.0;
    for (const auto& [u, v] : pts) {
      const double s = iu.to_unit(u);
      const double r = iv.to_unit(v);
      const double da = detail::chebyshev_eval(ca, s, r) - f.alpha(u, v).real();
      const double db = detail::chebyshev_eval(cb, s, r) - f.beta(u, v).real();
      err = std::max(err, std::hypot(da, db));
    }
    if (!std::isfinite(err)) throw DomainError("calc_poly_approx: f is not finite on the bounding box");
    if (err <= 0.25 * eps) {
      const std::size_t n = t.rows();
      const QMatrix as = (d.a - scalar_matrix(n, iu.center)) * (1.0 / iu.half);
      const QMatrix bs = (d.b - scalar_matrix(n, iv.center)) * (1.0 / iv.half);
      const auto ta = detail::chebyshev_powers(as, degree + 1);
      const auto tb = detail::chebyshev_powers(bs, degree + 1);
      const QMatrix f0 = detail::chebyshev_matrix(ca, ta, tb);
      const QMatrix f1 = detail::chebyshev_matrix(cb, ta, tb);
      return {f0 + d.j * f1, degree, err};
    }
  }
  throw ConvergenceError("calc_poly_approx: degree cap reached before the requested accuracy");
}

// ---- simple functions -----------------------------------------------------------------------

/// sum_n c_n chi_{sigma_n} with pairwise disjoint sigma_n (sets of atom indices), c_n in C_j.
struct SimpleFunction {
  struct Term {
    Complex c;
    std::vector<std::size_t> atoms;
  };
  std::vector<Term> terms;

  static SimpleFunction indicator(std::size_t atom) { return {{{Complex(1.0), {atom}}}}; }
};

/// Per-atom values of a simple function (0 off its support). Throws DomainError when two
/// sets overlap or an index is out of range.
inline std::vector<Complex> simple_values(const SpectralMeasure& e, const SimpleFunction& f) {
  std::vector<Complex> vals(e.atoms.size(), Complex{});
  std::vector<bool> used(e.atoms.size(), false);
  for (const auto& term : f.terms)
    for (auto k : term.atoms) {
      if (k >= e.atoms.size()) throw DomainError("simple function: atom index out of range");
      if (used[k]) throw DomainError("simple function: sets are not disjoint");
      used[k] = true;
      vals[k] = term.c;
    }
  return vals;
}

/// f(T) = sum_n c_n E(sigma_n), c_n acting by left scalar multiplication over N_j.
inline QMatrix calc_simple(const SpectralMeasure& e, const SimpleFunction& f) {
  return calc_values(e, simple_values(e, f));
}

/// sup over atoms of nonzero measure.
inline double sup_norm(const SpectralMeasure& e, const std::vector<Complex>& values) {
  double m = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!e.atoms[k].basis_index.empty()) m = std::max(m, std::abs(values[k]));
  return m;
}

// ---- B_infinity -----------------------------------------------------------------------------

/// Values on atoms in C_j, std::nullopt standing for infinity.
struct BInftyFunction {
  std::vector<std::optional<Complex>> values;
};

struct BInftyResult {
  QMatrix value;               ///< f(T) on its domain, 0 on the complement
  QMatrix domain_projection;   ///< onto D(f(T)) = Ran(I - E(f = infinity))
  bool full_domain{true};
  /// sigma_1 subset sigma_2 subset ...: finite atoms added in order of increasing |f|
  std::vector<std::vector<std::size_t>> bounding_sequence;
};

inline BInftyResult calc_binf(const SpectralMeasure& e, const BInftyFunction& f) {
  if (f.values.size() != e.atoms.size()) throw DimensionError("calc_binf: one value per atom required");
  std::vector<std::size_t> finite;
  std::vector<Complex> vals(e.atoms.size(), Complex{});
  BInftyResult out{QMatrix(e.dim, e.dim), QMatrix::identity(e.dim), true, {}};
  for (std::size_t k = 0; k < e.atoms.size(); ++k) {
    if (f.values[k] && is_finite(*f.values[k])) {
      finite.push_back(k);
      vals[k] = *f.values[k];
    } else if (!e.atoms[k].basis_index.empty()) {
      out.domain_projection -= e.atoms[k].projection;
      out.full_domain = false;
    }
  }
  std::stable_sort(finite.begin(), finite.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(vals[a]) < std::abs(vals[b]); });
  std::vector<std::size_t> acc;
  for (auto k : finite) {
    acc.push_back(k);
    auto sorted = acc;
    std::sort(sorted.begin(), sorted.end());
    out.bounding_sequence.push_back(std::move(sorted));
  }
  // the sequence stabilizes at its last element, where chi_sigma f is f restricted to finite atoms
  out.value = calc_values(e, vals);
  return out;
}

/// max_n ||(E(sigma_n) f(T) - f(T) E(sigma_n)) D|| with D the domain projection.
inline double binf_containment_residual(const SpectralMeasure& e, const BInftyResult& r) {
  double worst = 0.0;
  for (const auto& s : r.bounding_sequence) {
    const QMatrix es = measure_of(e, s);
    worst = std::max(worst, residual_norm((es * r.value - r.value * es) * r.domain_projection));
  }
  return worst;
}

// ---- inversion ------------------------------------------------------------------------------

/// (1/f)(T) with 1/infinity = 0. Throws SingularError when f vanishes on an atom of nonzero
/// measure.
inline QMatrix invert_values(const SpectralMeasure& e, const std::vector<Complex>& values) {
  if (values.size() != e.atoms.size()) throw DimensionError("invert_calc: one value per atom required");
  std::vector<Complex> inv(values.size(), Complex{});
  const double scale = std::max(1.0, sup_norm(e, values));
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (e.atoms[k].basis_index.empty()) continue;
    if (!is_finite(values[k])) continue;
    if (std::abs(values[k]) <= 1e-14 * scale) throw SingularError("invert_calc: f vanishes on an atom of nonzero measure");
    inv[k] = 1.0 / values[k];
  }
  return calc_values(e, inv);
}

inline QMatrix invert_calc(const SpectralMeasure& e, const SliceFunction& f) {
  validate_slice_function(f, default_symmetry_samples());
  return invert_values(e, atom_values(e, f));
}

// ---- push-forward and change of variables ------------------------------------------------------

/// E~(sigma) = E(g^{-1}(sigma)) for g given by its value on each atom. Images in the lower half
/// of C_j move to their sphere representative, and the basis vectors of such an atom are
/// right-multiplied by the unit k orthogonal to j so that integrals keep their value; atoms with
/// equal images merge.
inline SpectralMeasure pushforward_values(const SpectralMeasure& e, const std::vector<Complex>& vals,
                                          const Tolerance& tol = {}) {
  if (vals.size() != e.atoms.size()) throw DimensionError("pushforward: one value per atom required");
  const Quaternion k = orthogonal_unit(e.j);
  SpectralMeasure out;
  out.j = e.j;
  out.dim = e.dim;
  out.basis = e.basis;
  double scale = 1.0;
  for (const auto& v : vals)
    if (is_finite(v)) scale = std::max(scale, std::abs(v));
  for (std::size_t a = 0; a < e.atoms.size(); ++a) {
    Complex z = vals[a];
    if (!is_finite(z)) throw DomainError("pushforward: g is undefined on an atom");
    if (z.imag() < 0.0) {
      z = std::conj(z);
      for (auto idx : e.atoms[a].basis_index) out.basis[idx] = scale_right(out.basis[idx], k);
    }
    const Quaternion p = from_slice(z, e.j);
    auto same = std::find_if(out.atoms.begin(), out.atoms.end(),
                             [&](const Atom& x) { return distance(x.p, p) <= tol.bound(scale); });
    if (same == out.atoms.end()) {
      out.atoms.push_back({p, e.atoms[a].projection, e.atoms[a].basis_index});
    } else {
      same->projection += e.atoms[a].projection;
      same->basis_index.insert(same->basis_index.end(), e.atoms[a].basis_index.begin(), e.atoms[a].basis_index.end());
    }
  }
  std::stable_sort(out.atoms.begin(), out.atoms.end(), [](const Atom& x, const Atom& y) {
    return x.p.s0 != y.p.s0 ? x.p.s0 < y.p.s0 : x.p.imag_norm() < y.p.imag_norm();
  });
  return out;
}

inline SpectralMeasure pushforward(const SpectralMeasure& e, const SliceFunction& g, const Tolerance& tol = {}) {
  validate_slice_function(g, default_symmetry_samples());
  return pushforward_values(e, atom_values(e, g), tol);
}

/// ||int h dE~ - int (h o g) dE|| with E~ the push-forward of E under g.
inline double change_of_variables_check(const SpectralMeasure& e, const SliceFunction& g, const SliceFunction& h) {
  const auto pushed = pushforward(e, g);
  return residual_norm(calc_continuous(pushed, h) - calc_continuous(e, slice::compose(h, g)));
}

// ---- verification reports -------------------------------------------------------------------

namespace detail {

struct SpherePoint {
  double re;
  double im;
};

inline std::vector<SpherePoint> sorted_points(std::vector<SpherePoint> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const SpherePoint& a, const SpherePoint& b) { return a.re != b.re ? a.re < b.re : a.im < b.im; });
  return pts;
}

}  // namespace detail

/// sigma_S(f(T)) against {f(p_k)} as multisets with multiplicity, within tol * max(1, sup |f|).
inline CheckReport spectral_mapping_check(const QMatrix& t, const SliceFunction& f, double tol = 1e-8,
                                          const ImaginaryUnit& j = ImaginaryUnit()) {
  CheckReport rep;
  const auto e = spectral_measure(t, j);
  const auto vals = atom_values(e, f);
  const QMatrix ft = calc_values(e, vals);
  const auto spec = s_spectrum(ft, j);
  std::vector<detail::SpherePoint> expected;
  std::vector<detail::SpherePoint> actual;
  for (std::size_t k = 0; k < e.atoms.size(); ++k)
    for (int r = 0; r < multiplicity(e.atoms[k]); ++r) expected.push_back({vals[k].real(), std::abs(vals[k].imag())});
  for (const auto& sp : spec.spheres)
    for (int r = 0; r < sp.multiplicity; ++r) actual.push_back({sp.rep.s0, sp.rep.imag_norm()});
  rep.require("multiset_sizes_equal", expected.size() == actual.size());
  double worst = expected.size() == actual.size() ? 0.0 : std::numeric_limits<double>::infinity();
  if (expected.size() == actual.size()) {
    const auto a = detail::sorted_points(actual);
    const auto b = detail::sorted_points(expected);
    for (std::size_t k = 0; k < a.size(); ++k)
      worst = std::max(worst, std::hypot(a[k].re - b[k].re, a[k].im - b[k].im));
  }
  rep.add("max_sphere_distance", worst, tol * std::max(1.0, sup_norm(e, vals)));
  return rep;
}

/// ||f(T)|| = sup |f(p_k)|, f0(T) and f1(T) self-adjoint with f(T) = f0(T) + J f1(T), and
/// ||f(T) x||^2 = sum_k |f(p_k)|^2 <P_k x, x> on random x.
inline CheckReport check_isometry_and_selfadjoint_parts(const QMatrix& t, const SliceFunction& f,
                                                        const Tolerance& tol = {}, std::uint64_t seed = 3,
                                                        const ImaginaryUnit& j = ImaginaryUnit()) {
  CheckReport rep;
  const auto e = spectral_measure(t, j);
  const auto vals = atom_values(e, f);
  const QMatrix ft = calc_values(e, vals);
  const double sup = sup_norm(e, vals);
  rep.add("norm_equals_sup", std::abs(operator_norm(ft) - sup), tol.bound(sup));
  if (f.kind == SliceKind::intrinsic) {
    const auto [f0, f1] = calc_components(e, f);
    const auto d = decompose_TABJ(t, j);
    const double s = std::max(1.0, sup);
    rep.add("f0_self_adjoint", residual_norm(f0 - adjoint(f0)), tol.bound(s));
    rep.add("f1_self_adjoint", residual_norm(f1 - adjoint(f1)), tol.bound(s));
    rep.add("f_equals_f0_plus_j_f1", residual_norm(ft - (f0 + d.j * f1)), tol.bound(s));
  }
  Rng rng(seed);
  double worst = 0.0;
  for (int r = 0; r < 5; ++r) {
    const QVector x = random_vector(t.rows(), rng);
    const double lhs = std::pow(vector_norm(apply(ft, x)), 2);
    double rhs = 0.0;
    const auto mu = measure_mu_xy(e, x, x);
    for (std::size_t k = 0; k < e.atoms.size(); ++k)
      if (!e.atoms[k].basis_index.empty()) rhs += std::norm(vals[k]) * mu[k].s0;
    const double xx = std::pow(vector_norm(x), 2);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1e-300, std::max(1.0, sup * sup) * xx));
  }
  rep.add("norm_identity_relative", worst, tol.bound(1.0));
  return rep;
}

}  // namespace qspec
