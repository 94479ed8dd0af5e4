#pragma once

// Numerical verification of every structural identity for a single normal matrix. Shared by the
// command-line `verify` and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "qspec/bounded_transform.hpp"
#include "qspec/functional_calculus.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/random.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"

namespace qspec {

struct VerifyConfig {
  Tolerance tol{};
  ImaginaryUnit j{};
  std::uint64_t seed{42};
  int axial_samples{20};
  int resolvent_trials{5};
  double roundtrip_rtol{1e-8};
};

/// Distance from q to the nearest sphere of the spectrum.
inline double distance_to_spectrum(const Quaternion& q, const SSpectrum& spec) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& sp : spec.spheres) d = std::min(d, distance_to_sphere(q, sp.rep.s0, sp.rep.imag_norm()));
  return d;
}

/// Quaternion at distance >= min_dist from every sphere, drawn around the spectrum.
inline Quaternion sample_off_spectrum(const SSpectrum& spec, double radius, double min_dist, Rng& rng) {
  for (;;) {
    const Quaternion q = random_quaternion(rng) * radius;
    if (distance_to_spectrum(q, spec) >= min_dist) return q;
  }
}

/// Sphere points fail the resolvent test for `samples` random units; points at distance >= 0.1
/// from the spectrum pass it. Values are counts of disagreeing samples.
inline CheckReport check_axial_symmetry(const QMatrix& t, const SSpectrum& spec, Rng& rng, int samples = 20) {
  CheckReport rep;
  int on_bad = 0;
  int off_bad = 0;
  const double radius = std::max(1.0, operator_norm(t));
  for (const auto& sp : spec.spheres) {
    const double u = sp.rep.s0;
    const double v = sp.rep.imag_norm();
    for (int r = 0; r < samples; ++r) {
      const Quaternion i = random_imaginary_unit(rng);
      if (in_s_resolvent_set(t, Quaternion(u) + i * v)) ++on_bad;
      if (!in_s_resolvent_set(t, sample_off_spectrum(spec, radius, 0.1, rng))) ++off_bad;
    }
  }
  rep.add("sphere_points_in_resolvent_set", on_bad, 0.0);
  rep.add("off_sphere_points_in_spectrum", off_bad, 0.0);
  return rep;
}

/// Random (s, p) off the spectrum with dist(p, sphere(s)) >= 0.1; residual against
/// 1e-9 max(1, ||T||).
inline double worst_resolvent_residual(const QMatrix& t, const SSpectrum& spec, Rng& rng, int trials) {
  const double radius = std::max(1.0, operator_norm(t));
  double worst = 0.0;
  for (int r = 0; r < trials; ++r) {
    const Quaternion s = sample_off_spectrum(spec, radius, 0.1, rng);
    Quaternion p;
    do {
      p = sample_off_spectrum(spec, radius, 0.1, rng);
    } while (distance_to_sphere(p, s.s0, s.imag_norm()) < 0.1);
    worst = std::max(worst, check_resolvent_equation(t, s, p).residual);
  }
  return worst;
}

/// Multiplicities, projections and right eigenvectors of the S-spectrum.
inline CheckReport check_spectrum(const QMatrix& t, const SSpectrum& spec, const Tolerance& tol) {
  CheckReport rep;
  const std::size_t n = t.rows();
  const double nt = std::max(1.0, operator_norm(t));
  int total = 0;
  QMatrix sum(n, n);
  double idem = 0.0;
  double eig = 0.0;
  double half_plane = 0.0;
  for (const auto& sp : spec.spheres) {
    total += sp.multiplicity;
    half_plane = std::max(half_plane, distance(sp.rep, sphere_representative(sp.rep, spec.j)));
    if (!sp.projection) continue;
    sum += *sp.projection;
    idem = std::max(idem, residual_norm(*sp.projection * *sp.projection - *sp.projection));
    for (const auto& y : sp.vectors) {
      const QVector ty = apply(t, y);
      const QVector yp = scale_right(y, sp.rep);
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r = std::hypot(r, norm(ty[i] - yp[i]));
      eig = std::max(eig, r);
    }
  }
  rep.require("multiplicities_sum_to_n", total == static_cast<int>(n));
  rep.require("spectrum_nonempty", n == 0 || !spec.spheres.empty());
  rep.add("reps_in_upper_half_slice", half_plane, tol.bound(nt));
  rep.add("projections_sum_to_identity", residual_norm(sum - QMatrix::identity(n)), tol.bound(1.0));
  rep.add("projections_idempotent", idem, tol.bound(1.0));
  rep.add("right_eigenvectors", eig, tol.bound(nt));
  return rep;
}

/// Reconstruction from the measure and orthonormality of its basis.
inline CheckReport check_measure(const QMatrix& t, const SpectralMeasure& e, const Tolerance& tol) {
  CheckReport rep;
  const std::size_t n = t.rows();
  const double nt = std::max(1.0, operator_norm(t));
  rep.add("reconstruct", residual_norm(reconstruct(e) - t), tol.bound(nt));
  QMatrix gram(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) gram(a, b) = inner(e.basis[b], e.basis[a]);
  rep.add("basis_orthonormal", residual_norm(gram - QMatrix::identity(n)), tol.bound(1.0));
  return rep;
}

/// *-homomorphism identities for intrinsic f, g together with the norm isometry, J commuting
/// with f(T) and f(T)^* f(T) = (conj(f) f)(T).
inline CheckReport check_calculus(const SpectralMeasure& e, const DecompositionABJ& d,
                                  const SliceFunction& f, const SliceFunction& g, const Tolerance& tol) {
  CheckReport rep;
  const QMatrix ft = calc_continuous(e, f);
  const QMatrix gt = calc_continuous(e, g);
  const double sf = std::max(1.0, sup_norm(e, atom_values(e, f)));
  const double sg = std::max(1.0, sup_norm(e, atom_values(e, g)));
  rep.add("sum", residual_norm(calc_continuous(e, slice::sum(f, g)) - (ft + gt)), tol.bound(sf + sg));
  rep.add("product", residual_norm(calc_continuous(e, slice::product(f, g)) - ft * gt), tol.bound(sf * sg));
  rep.add("adjoint", residual_norm(calc_continuous(e, slice::conjugate(f)) - adjoint(ft)), tol.bound(sf));
  rep.add("j_commutes", residual_norm(d.j * ft - ft * d.j), tol.bound(sf));
  rep.add("abs_square", residual_norm(adjoint(ft) * ft - calc_continuous(e, slice::product(slice::conjugate(f), f))),
          tol.bound(sf * sf));
  const double sup = sup_norm(e, atom_values(e, f));
  rep.add("isometry", std::abs(operator_norm(ft) - sup), tol.bound(sup));
  return rep;
}

/// A random intrinsic function: a real cubic or exp(c p), scaled to stay moderate on the
/// spectrum of a matrix with norm `scale`.
inline SliceFunction random_intrinsic(Rng& rng, double scale) {
  std::normal_distribution<double> gauss;
  std::bernoulli_distribution coin(0.5);
  const double s = 1.0 / std::max(1.0, scale);
  if (coin(rng)) {
    const double c = gauss(rng) * s;
    const double a = gauss(rng);
    return slice::sum(slice::constant(a), slice::compose(slice::exp(), slice::real_polynomial({0.0, c})));
  }
  return slice::real_polynomial({gauss(rng), gauss(rng) * s, gauss(rng) * s * s, gauss(rng) * s * s * s});
}

/// The whole suite for one normal matrix. Throws NotNormalError for non-normal T.
inline CheckReport verify_matrix(const QMatrix& t, const VerifyConfig& cfg = {}) {
  require_normal(t, "verify");
  CheckReport rep;
  Rng rng(cfg.seed);
  const auto& tol = cfg.tol;
  const double nt = operator_norm(t);

  const auto spec = s_spectrum(t, cfg.j);
  rep.merge(check_spectrum(t, spec, tol), "spectrum.");
  rep.merge(spectrum_bound_check(t, tol), "spectrum.");
  rep.merge(check_axial_symmetry(t, spec, rng, cfg.axial_samples), "axial.");
  rep.add("resolvent.equation", worst_resolvent_residual(t, spec, rng, cfg.resolvent_trials),
          1e-9 * std::max(1.0, nt));

  const auto d = decompose_TABJ(t, cfg.j);
  rep.merge(verify_decomposition(t, d, tol), "decomposition.");

  const auto e = spectral_measure(t, cfg.j);
  rep.merge(check_measure(t, e, tol), "measure.");
  rep.merge(verify_measure_axioms(e, tol, cfg.seed), "measure.axiom_");

  const auto f = random_intrinsic(rng, nt);
  const auto g = random_intrinsic(rng, nt);
  rep.merge(check_calculus(e, d, f, g, tol), "calculus.");
  rep.merge(spectral_mapping_check(t, f, 1e-8, cfg.j), "calculus.mapping_");
  rep.merge(check_isometry_and_selfadjoint_parts(t, f, tol, cfg.seed, cfg.j), "calculus.");

  rep.merge(verify_transform(t, tol, cfg.roundtrip_rtol, cfg.j), "transform.");
  rep.merge(corollary_forms_check(t, tol, cfg.j), "corollary.");
  return rep;
}

}  // namespace qspec
