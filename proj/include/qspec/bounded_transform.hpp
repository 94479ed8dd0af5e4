#pragma once

// The bounded transform Z_T = T C_T^{1/2}, C_T = (I + T^* T)^{-1}, its inverse map
// phi(p) = p (1 - |p|^2)^{-1/2}, and recovery of T from Z_T through the spectral measure of Z_T.
//
// C_T, C_T^{1/2} and Z_T are assembled from the singular value decomposition T V = U Sigma, so
// 1 / (1 + sigma^2) keeps full relative accuracy even when ||T|| is large. The factors are kept
// in the pair and recovery reads the gaps 1 - |p|^2 from them rather than from |p| itself,
// which at ||T|| = 1e6 would have lost most of its digits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "qspec/errors.hpp"
#include "qspec/functional_calculus.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/random.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"

namespace qspec {

struct TransformPair {
  QMatrix t;
  QMatrix c;      ///< (I + T^* T)^{-1}
  QMatrix zroot;  ///< C^{1/2}
  QMatrix z;      ///< T C^{1/2}
  std::vector<double> sigma;  ///< singular values of T, descending
  QMatrix v;                  ///< right singular vectors of T: C = V (1 + Sigma^2)^{-1} V^*
};

/// phi(p) = p (1 - |p|^2)^{-1/2}; DomainError for |p| >= 1.
inline Quaternion phi(const Quaternion& p) {
  const double n2 = norm2(p);
  if (!(n2 < 1.0)) throw DomainError("phi: |p| must be below 1");
  return p / std::sqrt(1.0 - n2);
}

/// psi(q) = q (1 + |q|^2)^{-1/2}, the inverse of phi.
inline Quaternion psi(const Quaternion& q) {
  const double n = norm(q);
  // written to avoid overflowing |q|^2 for huge |q|
  if (n > 1.0) return q / (n * std::sqrt(1.0 + 1.0 / (n * n)));
  return q / std::sqrt(1.0 + n * n);
}

inline TransformPair z_transform(const QMatrix& t) {
  if (!t.is_square()) throw DimensionError("z_transform: matrix is not square");
  const std::size_t n = t.rows();
  auto svd = jacobi_svd(t);
  TransformPair pair{t, QMatrix(n, n), QMatrix(n, n), QMatrix(n, n), svd.sigma, svd.v};
  for (std::size_t k = 0; k < n; ++k) {
    const double s = svd.sigma[k];
    const double c = 1.0 / (1.0 + s * s);
    const QVector vk = svd.v.column(k);
    pair.c += outer_scaled<Quaternion>(vk, Quaternion(c));
    pair.zroot += outer_scaled<Quaternion>(vk, Quaternion(std::sqrt(c)));
    if (s > 0.0) {
      // Z v_k = T v_k (1 + s^2)^{-1/2} = u_k s (1 + s^2)^{-1/2}
      const QVector uk = svd.u.column(k);
      const double zk = s * std::sqrt(c);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < n; ++l) pair.z(i, l) += uk[i] * zk * conj(vk[l]);
    }
  }
  return pair;
}

/// C_T = (I + T^* T)^{-1}.
inline QMatrix c_transform(const QMatrix& t) { return z_transform(t).c; }

struct RecoverResult {
  QMatrix t;
  SpectralMeasure measure;   ///< push-forward of the (refined) measure of Z under phi
  double min_gap{1.0};       ///< min over atoms of 1 - |p|^2
};

namespace detail {

/// Splits every atom of the measure of Z by the gaps 1 - |p|^2 read from C, returning the refined
/// measure together with the gap of each refined atom.
inline std::pair<SpectralMeasure, std::vector<double>> refine_by_gap(const SpectralMeasure& f,
                                                                     const TransformPair& pair) {
  const std::size_t n = f.dim;
  SpectralMeasure out;
  out.j = f.j;
  out.dim = n;
  std::vector<double> gaps;
  const auto vh = adjoint(pair.v);
  for (const auto& atom : f.atoms) {
    const std::size_t m = atom.basis_index.size();
    if (m == 0) continue;
    // W = V^* Y, M = W^* D W with D = diag(1 / (1 + sigma^2))
    QMatrix y(n, m);
    for (std::size_t a = 0; a < m; ++a) y.set_column(a, f.basis[atom.basis_index[a]]);
    const QMatrix w = vh * y;
    QMatrix m_gap(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        Quaternion acc{};
        for (std::size_t l = 0; l < n; ++l)
          acc += conj(w(l, a)) * (1.0 / (1.0 + pair.sigma[l] * pair.sigma[l])) * w(l, b);
        // for non-real p the eigenspace is only a right C_j-space, so the rotation must stay in C_j
        m_gap(a, b) = atom.p.imag_norm() > 0.0 ? from_slice(to_slice(acc, f.j), f.j) : acc;
      }
    const auto eig = jacobi_eigen(m_gap);
    const QMatrix rotated = y * eig.vectors;
    const double abs_p = norm(atom.p);
    for (std::size_t a = 0; a < m; ++a) {
      const double gap = eig.values[a];
      // refined point keeps the direction of p and takes |p| = sqrt(1 - gap)
      const Quaternion p = abs_p > 0.0 ? atom.p * (std::sqrt(std::max(0.0, 1.0 - gap)) / abs_p) : atom.p;
      const std::size_t idx = out.basis.size();
      out.basis.push_back(rotated.column(a));
      out.atoms.push_back({p, outer_self<Quaternion>(out.basis.back()), {idx}});
      gaps.push_back(gap);
    }
  }
  return {std::move(out), std::move(gaps)};
}

}  // namespace detail

/// T = int phi(p) dF(p) with F the spectral measure of Z. Throws NotNormalError when Z is not
/// normal and ConsistencyError when an atom of nonzero measure sits on the unit sphere.
inline RecoverResult recover_T(const TransformPair& pair, const ImaginaryUnit& j = ImaginaryUnit()) {
  const auto f = spectral_measure(pair.z, j);
  auto [refined, gaps] = detail::refine_by_gap(f, pair);
  RecoverResult out;
  BInftyFunction phi_values;
  for (std::size_t k = 0; k < refined.atoms.size(); ++k) {
    const double gap = gaps[k];
    out.min_gap = std::min(out.min_gap, gap);
    if (!(gap > 0.0)) {
      phi_values.values.emplace_back(std::nullopt);
      continue;
    }
    const Quaternion p = refined.atoms[k].p;
    const double abs_p = norm(p);
    // small |p|: p / sqrt(gap); large |p|: direction times sqrt((1 - gap) / gap)
    const Quaternion value = abs_p < 0.5 ? p / std::sqrt(gap) : p * (std::sqrt((1.0 - gap) / gap) / abs_p);
    phi_values.values.emplace_back(to_slice(value, j));
  }
  const auto binf = calc_binf(refined, phi_values);
  if (!binf.full_domain) throw ConsistencyError("recover_T: Z has spectrum of nonzero measure on the unit sphere");
  std::vector<Complex> vals;
  for (const auto& v : phi_values.values) vals.push_back(*v);
  out.measure = pushforward_values(refined, vals);
  out.t = reconstruct(out.measure);
  if (f.atoms.empty()) out.min_gap = 1.0;
  return out;
}

/// Z (C^{1/2})^{-1}, formed literally. Only well conditioned for moderate ||T||.
inline QMatrix recover_T_direct(const TransformPair& pair) { return pair.z * inverse(pair.zroot); }

/// Normal matrix with the prescribed spheres (rep in C_j^+, multiplicity): each copy is moved to a
/// random point of its sphere and the diagonal is conjugated by a random unitary.
inline QMatrix unbounded_model(const std::vector<std::pair<Quaternion, int>>& spheres, Rng& rng) {
  std::vector<Quaternion> d;
  for (const auto& [rep, mult] : spheres) {
    if (mult < 1) throw DomainError("unbounded_model: multiplicities must be positive");
    for (int r = 0; r < mult; ++r) {
      const Quaternion a = random_unit_quaternion(rng);
      d.push_back(a * rep * conj(a));
    }
  }
  return conjugate_diagonal(random_unitary(d.size(), rng), d);
}

struct TransformSummary {
  double norm_t{0.0};
  double norm_z{0.0};
  double c_identity_residual{0.0};
  double roundtrip_residual{0.0};
  double min_gap{1.0};
};

/// ||Z|| <= 1, C = I - Z^* Z, (Z_T)^* = Z_{T^*}, Z normal for normal T, and the roundtrip
/// through recover_T against tolerance rtol_roundtrip * ||T||.
inline CheckReport verify_transform(const QMatrix& t, const Tolerance& tol = {}, double rtol_roundtrip = 1e-8,
                                    const ImaginaryUnit& j = ImaginaryUnit(), TransformSummary* summary = nullptr) {
  CheckReport rep;
  const std::size_t n = t.rows();
  const auto pair = z_transform(t);
  const auto pair_adj = z_transform(adjoint(t));
  const double nt = operator_norm(t);
  const double nz = operator_norm(pair.z);
  const double cres = residual_norm(pair.c - (QMatrix::identity(n) - adjoint(pair.z) * pair.z));
  rep.add("z_norm_at_most_one", nz - 1.0, tol.bound(1.0));
  rep.add("c_equals_i_minus_zstar_z", cres, tol.bound(operator_norm(pair.c)));
  rep.add("z_adjoint_is_z_of_adjoint", residual_norm(adjoint(pair.z) - pair_adj.z), tol.bound(1.0));
  TransformSummary s{nt, nz, cres, 0.0, 1.0};
  if (is_normal(t)) {
    rep.add("z_normal", residual_norm(pair.z * adjoint(pair.z) - adjoint(pair.z) * pair.z), tol.bound(1.0));
    const auto rec = recover_T(pair, j);
    s.roundtrip_residual = residual_norm(rec.t - t);
    s.min_gap = rec.min_gap;
    rep.add("roundtrip", s.roundtrip_residual, rtol_roundtrip * std::max(1.0, nt));
  }
  if (summary) *summary = s;
  return rep;
}

/// Atoms real / of the form j t with t >= 0 / of the form e^{j t} with t in [0, pi] for
/// self-adjoint / anti-self-adjoint / unitary T, plus the reconstruction of T.
inline CheckReport corollary_forms_check(const QMatrix& t, const Tolerance& tol = {},
                                         const ImaginaryUnit& j = ImaginaryUnit()) {
  CheckReport rep;
  const auto cls = classify(t);
  const auto e = spectral_measure(t, j);
  const double nt = std::max(1.0, operator_norm(t));
  double max_im = 0.0;
  double max_re = 0.0;
  double unit_dev = 0.0;
  double off_slice = 0.0;
  for (const auto& a : e.atoms) {
    max_im = std::max(max_im, a.p.imag_norm());
    max_re = std::max(max_re, std::abs(a.p.s0));
    unit_dev = std::max(unit_dev, std::abs(norm(a.p) - 1.0));
    off_slice = std::max(off_slice, distance(a.p, sphere_representative(a.p, j)));
  }
  rep.add("atoms_in_upper_half_slice", off_slice, tol.bound(nt));
  if (cls.hermitian) rep.add("self_adjoint_atoms_real", max_im, tol.bound(nt));
  if (cls.anti_hermitian) rep.add("anti_self_adjoint_atoms_imaginary", max_re, tol.bound(nt));
  if (cls.unitary) rep.add("unitary_atoms_on_circle", unit_dev, tol.bound(1.0));
  rep.add("reconstruction", residual_norm(reconstruct(e) - t), tol.bound(nt));
  return rep;
}

}  // namespace qspec
