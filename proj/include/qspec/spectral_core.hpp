#pragma once

// Atomic spectral measures of normal quaternionic matrices, the decomposition T = A + J B,
// left scalar multiplication over an orthonormal basis N_j, and the measure-axiom checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/random.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"

namespace qspec {

/// Orthonormal y_1..y_n with J y_k = y_k j.
struct HilbertBasis {
  ImaginaryUnit j;
  std::vector<QVector> vectors;
};

struct Atom {
  Quaternion p;                          ///< point of C_j^+
  QMatrix projection;                    ///< E({p})
  std::vector<std::size_t> basis_index;  ///< basis vectors spanning the range of the projection
};

/// Finite atomic projection-valued measure on sigma_S(T) cap C_j^+. An atom may be null
/// (no basis vectors, zero projection), which is how merged or padded atoms are carried.
struct SpectralMeasure {
  ImaginaryUnit j;
  std::size_t dim{0};
  std::vector<Atom> atoms;
  std::vector<QVector> basis;
};

struct DecompositionABJ {
  QMatrix a;  ///< (T + T^*) / 2
  QMatrix b;  ///< |T - T^*| / 2
  QMatrix j;  ///< anti-self-adjoint unitary; L_j of the eigenbasis on Ker(T - T^*)
  QMatrix kernel_projection;  ///< onto Ker(T - T^*), where J is conventional
  std::size_t kernel_dim{0};
};

// ---- left scalar multiplication ------------------------------------------------------------

/// L_p x = sum_k y_k p <x, y_k>.
inline QMatrix left_scalar(const std::vector<QVector>& basis, const Quaternion& p) {
  const std::size_t n = basis.empty() ? 0 : basis.front().size();
  QMatrix out(n, n);
  for (const auto& y : basis) out += outer_scaled<Quaternion>(y, p);
  return out;
}

inline QMatrix left_scalar(const HilbertBasis& basis, const Quaternion& p) {
  return left_scalar(basis.vectors, p);
}

// ---- measure construction ------------------------------------------------------------------

inline void require_normal(const QMatrix& t, const char* where) {
  if (!t.is_square()) throw DimensionError(std::string(where) + ": matrix is not square");
  if (!is_normal(t)) throw NotNormalError(std::string(where) + ": matrix is not normal");
}

inline SpectralMeasure measure_from_spectrum(SSpectrum spec, std::size_t n) {
  SpectralMeasure e;
  e.j = spec.j;
  e.dim = n;
  for (auto& sp : spec.spheres) {
    Atom atom{sp.rep, std::move(*sp.projection), {}};
    for (auto& y : sp.vectors) {
      atom.basis_index.push_back(e.basis.size());
      e.basis.push_back(std::move(y));
    }
    e.atoms.push_back(std::move(atom));
  }
  return e;
}

/// Throws NotNormalError for non-normal T.
inline SpectralMeasure spectral_measure(const QMatrix& t, const ImaginaryUnit& j = ImaginaryUnit()) {
  require_normal(t, "spectral_measure");
  return measure_from_spectrum(s_spectrum(t, j), t.rows());
}

/// Every basis vector belongs to exactly one atom and the basis has dim vectors.
inline void require_consistent(const SpectralMeasure& e) {
  if (e.basis.size() != e.dim) throw ConsistencyError("spectral measure: basis size differs from dimension");
  std::vector<int> seen(e.basis.size(), 0);
  for (const auto& a : e.atoms) {
    if (a.projection.rows() != e.dim || a.projection.cols() != e.dim)
      throw ConsistencyError("spectral measure: projection has the wrong shape");
    for (auto k : a.basis_index) {
      if (k >= e.basis.size()) throw ConsistencyError("spectral measure: basis index out of range");
      ++seen[k];
    }
  }
  for (int s : seen)
    if (s != 1) throw ConsistencyError("spectral measure: basis vectors and atoms do not match");
  for (const auto& y : e.basis)
    if (y.size() != e.dim) throw ConsistencyError("spectral measure: basis vector has the wrong length");
}

/// sum over atoms and their basis vectors of y f(p) y^*, the atomic spectral integral.
inline QMatrix integrate(const SpectralMeasure& e, const std::function<Quaternion(std::size_t)>& value_of_atom) {
  require_consistent(e);
  QMatrix out(e.dim, e.dim);
  for (std::size_t k = 0; k < e.atoms.size(); ++k) {
    if (e.atoms[k].basis_index.empty()) continue;
    const Quaternion c = value_of_atom(k);
    for (auto idx : e.atoms[k].basis_index) out += outer_scaled<Quaternion>(e.basis[idx], c);
  }
  return out;
}

/// T = int p dE(p).
inline QMatrix reconstruct(const SpectralMeasure& e) {
  return integrate(e, [&](std::size_t k) { return e.atoms[k].p; });
}

/// E(sigma) for sigma given as a set of atom indices, summed from the stored projections.
inline QMatrix measure_of(const SpectralMeasure& e, const std::vector<std::size_t>& sigma) {
  QMatrix out(e.dim, e.dim);
  for (auto k : sigma) {
    if (k >= e.atoms.size()) throw ConsistencyError("measure_of: atom index out of range");
    out += e.atoms[k].projection;
  }
  return out;
}

inline std::vector<std::size_t> all_atoms(const SpectralMeasure& e) {
  std::vector<std::size_t> s(e.atoms.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = k;
  return s;
}

inline int multiplicity(const Atom& a) { return static_cast<int>(a.basis_index.size()); }

// ---- N_j and the A + J B decomposition ---------------------------------------------------------

/// Orthonormal basis with J y = y j for an anti-self-adjoint unitary J. Throws DomainError
/// when J fails either test within 1e-8.
inline HilbertBasis build_basis_Nj(const QMatrix& jm, const ImaginaryUnit& j = ImaginaryUnit()) {
  const auto cls = classify(jm);
  if (!cls.anti_hermitian || !cls.unitary) throw DomainError("build_basis_Nj: J must be anti-self-adjoint and unitary");
  auto spec = s_spectrum(jm, j);
  HilbertBasis out{j, {}};
  for (auto& sp : spec.spheres) {
    if (distance(sp.rep, Quaternion(j)) > 1e-8) throw DomainError("build_basis_Nj: J has an eigenvalue off the unit sphere");
    for (auto& y : sp.vectors) out.vectors.push_back(std::move(y));
  }
  return out;
}

/// T = A + J B from the spectral basis of T: A, B, J are L_u, L_v, L_j with p = u + j v on
/// each basis vector. Throws NotNormalError for non-normal T.
inline DecompositionABJ decompose_TABJ(const QMatrix& t, const ImaginaryUnit& j = ImaginaryUnit()) {
  const auto e = spectral_measure(t, j);
  const std::size_t n = t.rows();
  DecompositionABJ d{(t + adjoint(t)) * 0.5, QMatrix(n, n), QMatrix(n, n), QMatrix(n, n), 0};
  for (const auto& atom : e.atoms) {
    const double v = atom.p.imag_norm();
    for (auto idx : atom.basis_index) {
      const auto& y = e.basis[idx];
      d.j += outer_scaled<Quaternion>(y, Quaternion(j));
      if (v > 0.0) {
        d.b += outer_scaled<Quaternion>(y, Quaternion(v));
      } else {
        d.kernel_projection += outer_self<Quaternion>(y);
        ++d.kernel_dim;
      }
    }
  }
  return d;
}

// ---- polarization and mu_{x,y} -------------------------------------------------------------

/// <T x, x> for the matrix T.
inline Quaternion quadratic_form(const QMatrix& t, const QVector& x) { return inner(apply(t, x), x); }

/// <T x, y> recovered from eight evaluations of the form q(z) = <T z, z>:
/// 4<Tx,y> = q(x+y) - q(x-y) + e1 q(x+y e1) - e1 q(x-y e1) + e1 q(x-y e2) e3
///           - e1 q(x+y e2) e3 + q(x+y e3) e3 - q(x-y e3) e3.
inline Quaternion polarization(const std::function<Quaternion(const QVector&)>& q, const QVector& x,
                               const QVector& y) {
  if (x.size() != y.size()) throw DimensionError("polarization: length mismatch");
  auto comb = [&](double sign, const Quaternion& unit) {
    QVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + (y[i] * unit) * sign;
    return q(z);
  };
  const Quaternion e1 = Quaternion::e1();
  const Quaternion e2 = Quaternion::e2();
  const Quaternion e3 = Quaternion::e3();
  const Quaternion one(1.0);
  const Quaternion sum = comb(1, one) - comb(-1, one) + e1 * comb(1, e1) - e1 * comb(-1, e1) +
                         e1 * comb(-1, e2) * e3 - e1 * comb(1, e2) * e3 + comb(1, e3) * e3 -
                         comb(-1, e3) * e3;
  return sum / 4.0;
}

/// mu_{x,y}({p_k}) = <P_k x, y> for each atom.
inline std::vector<Quaternion> measure_mu_xy(const SpectralMeasure& e, const QVector& x, const QVector& y) {
  std::vector<Quaternion> mu;
  mu.reserve(e.atoms.size());
  for (const auto& a : e.atoms) mu.push_back(inner(apply(a.projection, x), y));
  return mu;
}

// ---- verification ----------------------------------------------------------------------------

/// Properties (i)-(viii) of a spectral measure: norm bound, E(empty) = 0 and E(all) = I,
/// additivity, multiplicativity, self-adjointness, idempotence, commuting with f(T) for
/// C_j-valued f, and mutual commutation. Checked on all atom pairs and `random_sets` random
/// unions; f(T) is assembled from the basis, independently of the stored projections.
inline CheckReport verify_measure_axioms(const SpectralMeasure& e, const Tolerance& tol = {},
                                         std::uint64_t seed = 1, int random_sets = 8, int random_functions = 5) {
  CheckReport rep;
  const std::size_t n = e.dim;
  const std::size_t m = e.atoms.size();
  const double b = tol.bound(1.0);
  const QMatrix id = QMatrix::identity(n);
  Rng rng(seed);

  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t k = 0; k < m; ++k) sets.push_back({k});
  std::bernoulli_distribution coin(0.5);
  for (int r = 0; r < random_sets; ++r) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < m; ++k)
      if (coin(rng)) s.push_back(k);
    sets.push_back(std::move(s));
  }
  auto intersect = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& c) {
    std::vector<std::size_t> out;
    std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
    return out;
  };
  auto unite = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& c) {
    std::vector<std::size_t> out;
    std::set_union(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
    return out;
  };
  auto minus = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& c) {
    std::vector<std::size_t> out;
    std::set_difference(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(out));
    return out;
  };

  // C_j-valued test functions, evaluated on the atoms and integrated over the basis
  std::vector<QMatrix> ft;
  std::normal_distribution<double> gauss;
  for (int r = 0; r < random_functions; ++r) {
    std::vector<Quaternion> vals(m);
    for (auto& v : vals) v = Quaternion(gauss(rng)) + Quaternion(e.j) * gauss(rng);
    ft.push_back(integrate(e, [&](std::size_t k) { return vals[k]; }));
  }

  double norm_excess = 0.0;
  double add_res = 0.0;
  double mult_res = 0.0;
  double adj_res = 0.0;
  double idem_res = 0.0;
  double fcomm_res = 0.0;
  double comm_res = 0.0;
  for (const auto& s : sets) {
    const QMatrix es = measure_of(e, s);
    norm_excess = std::max(norm_excess, operator_norm(es) - 1.0);
    adj_res = std::max(adj_res, residual_norm(es - adjoint(es)));
    idem_res = std::max(idem_res, residual_norm(es * es - es));
    for (const auto& f : ft) fcomm_res = std::max(fcomm_res, residual_norm(es * f - f * es));
    for (const auto& t : sets) {
      const QMatrix et = measure_of(e, t);
      mult_res = std::max(mult_res, residual_norm(measure_of(e, intersect(s, t)) - es * et));
      comm_res = std::max(comm_res, residual_norm(es * et - et * es));
      const auto t_only = minus(t, s);
      add_res = std::max(add_res, residual_norm(measure_of(e, unite(s, t_only)) - es - measure_of(e, t_only)));
    }
  }
  rep.add("i_norm_at_most_one", std::max(0.0, norm_excess), b);
  rep.add("ii_empty_is_zero", residual_norm(measure_of(e, {})), b);
  rep.add("ii_total_is_identity", residual_norm(measure_of(e, all_atoms(e)) - id), b);
  rep.add("iii_additive", add_res, b);
  rep.add("iv_multiplicative", mult_res, b);
  rep.add("v_self_adjoint", adj_res, b);
  rep.add("vi_idempotent", idem_res, b);
  double fscale = 1.0;
  for (const auto& f : ft) fscale = std::max(fscale, operator_norm(f));
  rep.add("vii_commutes_with_f", fcomm_res, tol.bound(fscale));
  rep.add("viii_mutually_commute", comm_res, b);
  return rep;
}

/// (W commutes with A, B and J; W commutes with every atom projection), each decided against
/// tol * max(1, ||W||) * max(1, ||T||).
inline std::pair<bool, bool> commutant_check(const QMatrix& t, const QMatrix& w, double tol = kStructureTol,
                                             const ImaginaryUnit& j = ImaginaryUnit()) {
  const auto d = decompose_TABJ(t, j);
  const auto e = spectral_measure(t, j);
  const double scale = std::max(1.0, operator_norm(w)) * std::max(1.0, operator_norm(t));
  auto commutes = [&](const QMatrix& x) { return operator_norm(w * x - x * w) <= tol * scale; };
  const bool abj = commutes(d.a) && commutes(d.b) && commutes(d.j);
  bool ev = true;
  for (const auto& a : e.atoms) ev = ev && commutes(a.projection);
  return {abj, ev};
}

/// Decomposition invariants: reconstruction, the closed forms of A and B, mutual commutation and
/// the structure of J.
inline CheckReport verify_decomposition(const QMatrix& t, const DecompositionABJ& d, const Tolerance& tol = {}) {
  CheckReport rep;
  const double nt = std::max(1.0, operator_norm(t));
  const double b = tol.bound(nt);
  const std::size_t n = t.rows();
  rep.add("t_equals_a_plus_jb", residual_norm(t - (d.a + d.j * d.b)), b);
  rep.add("a_is_half_t_plus_adjoint", residual_norm(d.a - (t + adjoint(t)) * 0.5), b);
  rep.add("b_is_half_abs_skew_part", residual_norm(d.b - abs_op(t - adjoint(t)) * 0.5), b);
  rep.add("a_self_adjoint", residual_norm(d.a - adjoint(d.a)), b);
  rep.add("b_self_adjoint", residual_norm(d.b - adjoint(d.b)), b);
  const auto eb = hermitian_eigen(d.b, 1.0);
  rep.add("b_positive", std::max(0.0, -(eb.values.empty() ? 0.0 : eb.values.front())), b);
  rep.add("ab_commute", residual_norm(d.a * d.b - d.b * d.a), tol.bound(nt * nt));
  rep.add("aj_commute", residual_norm(d.a * d.j - d.j * d.a), b);
  rep.add("bj_commute", residual_norm(d.b * d.j - d.j * d.b), b);
  rep.add("j_anti_self_adjoint", residual_norm(d.j + adjoint(d.j)), tol.bound(1.0));
  rep.add("j_unitary", residual_norm(adjoint(d.j) * d.j - QMatrix::identity(n)), tol.bound(1.0));
  return rep;
}

}  // namespace qspec
