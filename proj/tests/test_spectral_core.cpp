#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "qspec/random.hpp"
#include "qspec/spectral_core.hpp"
#include "qspec/verify.hpp"
#include "test_support.hpp"

using namespace qspec;
using qspec::testing::diag;
using qspec::testing::diff;
using qspec::testing::mat;

namespace {

const Quaternion e1 = Quaternion::e1();
const Quaternion e2 = Quaternion::e2();
const Quaternion e3 = Quaternion::e3();

void expect_near(const Quaternion& a, const Quaternion& b, double tol) {
  EXPECT_LE(distance(a, b), tol) << a << " vs " << b;
}

void expect_all_pass(const CheckReport& rep) {
  for (const auto& it : rep.items()) EXPECT_TRUE(it.pass) << it.name << " = " << it.value << " > " << it.threshold;
}

}  // namespace

TEST(SpectralCore, DecompositionOfE1) {
  const auto d = decompose_TABJ(mat({{e1}}));
  EXPECT_LE(diff(d.a, mat({{0.0}})), 1e-15);
  EXPECT_LE(diff(d.b, mat({{1.0}})), 1e-15);
  EXPECT_LE(diff(d.j, mat({{e1}})), 1e-15);
  EXPECT_EQ(d.kernel_dim, 0u);
}

TEST(SpectralCore, DecompositionOfHermitianUsesTheKernelConvention) {
  const auto t = diag({1.0, 2.0});
  const auto d = decompose_TABJ(t);
  EXPECT_LE(diff(d.a, t), 1e-15);
  EXPECT_LE(diff(d.b, QMatrix(2, 2)), 1e-15);
  EXPECT_EQ(d.kernel_dim, 2u);
  EXPECT_LE(diff(d.kernel_projection, QMatrix::identity(2)), 1e-15);
  expect_all_pass(verify_decomposition(t, d));
}

TEST(SpectralCore, DecompositionInvariantsOnRandomNormal) {
  Rng rng(1);
  for (int r = 0; r < 40; ++r) {
    const auto t = random_normal(1 + r % 8, rng, std::pow(10.0, r % 4));
    const auto j = random_imaginary_unit(rng);
    const auto d = decompose_TABJ(t, j);
    expect_all_pass(verify_decomposition(t, d));
    // B is the closed form (1/2)|T - T^*| computed without the spectral route
    EXPECT_LE(diff(d.b, sqrt_positive(adjoint(t - adjoint(t)) * (t - adjoint(t))) * 0.5),
              1e-8 * std::max(1.0, operator_norm(t)));
  }
}

TEST(SpectralCore, DecompositionRejectsNonNormal) {
  EXPECT_THROW(decompose_TABJ(mat({{1.0, 1.0}, {0.0, 2.0}})), NotNormalError);
}

TEST(SpectralCore, BasisNjExamples) {
  const auto b1 = build_basis_Nj(mat({{e1}}));
  ASSERT_EQ(b1.vectors.size(), 1u);
  expect_near(b1.vectors[0][0], 1.0, 1e-15);

  const auto b2 = build_basis_Nj(mat({{e2}}));
  ASSERT_EQ(b2.vectors.size(), 1u);
  const double r = 1.0 / std::sqrt(2.0);
  expect_near(b2.vectors[0][0], Quaternion(r, 0, 0, r), 1e-15);
  // e2 a = a e1
  expect_near(e2 * b2.vectors[0][0], b2.vectors[0][0] * e1, 1e-15);

  EXPECT_THROW(build_basis_Nj(mat({{2.0 * e1}})), DomainError);
  EXPECT_THROW(build_basis_Nj(mat({{1.0}})), DomainError);
}

TEST(SpectralCore, BasisNjSynthesizesJ) {
  Rng rng(2);
  for (int r = 0; r < 20; ++r) {
    const std::size_t n = 1 + r % 6;
    std::vector<Quaternion> units(n);
    for (auto& u : units) u = random_imaginary_unit(rng);
    const auto jm = conjugate_diagonal(random_unitary(n, rng), units);
    const auto j = random_imaginary_unit(rng);
    const auto basis = build_basis_Nj(jm, j);
    EXPECT_LE(diff(left_scalar(basis, j), jm), 1e-10);
    for (const auto& y : basis.vectors) {
      const auto jy = qspec::apply(jm, y);
      const auto yj = scale_right(y, Quaternion(j));
      for (std::size_t i = 0; i < n; ++i) EXPECT_LE(norm(jy[i] - yj[i]), 1e-12);
    }
  }
}

TEST(SpectralCore, LeftScalarIsARepresentation) {
  Rng rng(3);
  const auto e = spectral_measure(random_normal(5, rng));
  const auto p = random_quaternion(rng);
  const auto q = random_quaternion(rng);
  EXPECT_LE(diff(left_scalar(e.basis, p) * left_scalar(e.basis, q), left_scalar(e.basis, p * q)), 1e-12 * norm(p) * norm(q));
  EXPECT_LE(diff(adjoint(left_scalar(e.basis, p)), left_scalar(e.basis, conj(p))), 1e-12 * norm(p));
  EXPECT_LE(diff(left_scalar(e.basis, 1.0), QMatrix::identity(5)), 1e-12);
}

TEST(SpectralCore, MeasureExamples) {
  const auto e = spectral_measure(diag({1.0, 2.0}));
  ASSERT_EQ(e.atoms.size(), 2u);
  expect_near(e.atoms[0].p, 1.0, 1e-15);
  expect_near(e.atoms[1].p, 2.0, 1e-15);
  EXPECT_LE(diff(e.atoms[0].projection, diag({1.0, 0.0})), 1e-15);
  EXPECT_LE(diff(e.atoms[1].projection, diag({0.0, 1.0})), 1e-15);
  EXPECT_LE(diff(reconstruct(e), diag({1.0, 2.0})), 1e-15);

  const auto f = spectral_measure(mat({{e2}}));
  ASSERT_EQ(f.atoms.size(), 1u);
  expect_near(f.atoms[0].p, e1, 1e-15);
  EXPECT_LE(diff(f.atoms[0].projection, mat({{1.0}})), 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  expect_near(f.basis[0][0], Quaternion(r, 0, 0, r), 1e-15);
  EXPECT_LE(diff(reconstruct(f), mat({{e2}})), 1e-15);
}

TEST(SpectralCore, RoundtripAndBasisProperty) {
  Rng rng(4);
  for (int r = 0; r < 100; ++r) {
    const std::size_t n = 1 + r % 8;
    const auto t = random_normal(n, rng, 1.0 + r % 10);
    const auto j = random_imaginary_unit(rng);
    const auto e = spectral_measure(t, j);
    const double nt = operator_norm(t);
    EXPECT_LE(diff(reconstruct(e), t), 1e-10 * nt);
    for (const auto& a : e.atoms) {
      EXPECT_GE(to_slice(a.p, j).imag(), 0.0);
      EXPECT_LE(distance(a.p, from_slice(to_slice(a.p, j), j)), 1e-14 * std::max(1.0, nt));
      for (auto idx : a.basis_index) {
        const auto& y = e.basis[idx];
        const auto ty = qspec::apply(t, y);
        const auto yp = scale_right(y, a.p);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::hypot(res, norm(ty[i] - yp[i]));
        EXPECT_LE(res, 1e-10 * nt);
      }
    }
  }
}

TEST(SpectralCore, PolarizationMatchesDirectPairing) {
  Rng rng(5);
  for (int r = 0; r < 100; ++r) {
    const std::size_t n = 1 + r % 5;
    const auto t = random_matrix(n, rng);
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    const auto form = [&](const QVector& z) { return quadratic_form(t, z); };
    const auto direct = inner(qspec::apply(t, x), y);
    EXPECT_LE(norm(polarization(form, x, y) - direct),
              1e-11 * std::max(1.0, operator_norm(t)) * vector_norm(x) * vector_norm(y));
    // x = y gives back the form itself
    EXPECT_LE(norm(polarization(form, x, x) - quadratic_form(t, x)), 1e-12 * std::max(1.0, operator_norm(t)) * vector_norm(x) * vector_norm(x));
  }
  const auto x = random_vector(3, rng);
  const auto y = random_vector(3, rng);
  const auto id_form = [](const QVector& z) { return inner(z, z); };
  EXPECT_LE(norm(polarization(id_form, x, y) - inner(x, y)), 1e-12 * vector_norm(x) * vector_norm(y));
  const auto zero_form = [](const QVector&) { return Quaternion(); };
  EXPECT_EQ(polarization(zero_form, x, y), Quaternion());
}

TEST(SpectralCore, MuXY) {
  const auto e = spectral_measure(diag({1.0, 2.0}));
  const auto mu = measure_mu_xy(e, e.basis[0], e.basis[0]);
  expect_near(mu[0], 1.0, 1e-15);
  expect_near(mu[1], 0.0, 1e-15);

  Rng rng(6);
  for (int r = 0; r < 30; ++r) {
    const std::size_t n = 1 + r % 6;
    const auto f = spectral_measure(random_normal(n, rng), random_imaginary_unit(rng));
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    const auto mxy = measure_mu_xy(f, x, y);
    const auto myx = measure_mu_xy(f, y, x);
    Quaternion total;
    for (std::size_t k = 0; k < mxy.size(); ++k) {
      EXPECT_LE(norm(conj(mxy[k]) - myx[k]), 1e-12 * vector_norm(x) * vector_norm(y));
      total += mxy[k];
    }
    EXPECT_LE(norm(total), vector_norm(x) * vector_norm(y) + 1e-10);
    EXPECT_LE(norm(total - inner(x, y)), 1e-12 * vector_norm(x) * vector_norm(y));
  }
}

TEST(SpectralCore, MeasureIsDeterminedByItsDiagonalForms) {
  // The same operator reached through a unitary change of coordinates gives the same mu_{x,x}
  // on a spanning set, and the projections agree; a different operator differs in mu.
  Rng rng(7);
  for (int r = 0; r < 20; ++r) {
    const std::size_t n = 2 + r % 5;
    const auto t = random_normal(n, rng);
    const auto u = random_unitary(n, rng);
    const auto e = spectral_measure(t);
    const auto f = spectral_measure(adjoint(u) * t * u);
    ASSERT_EQ(e.atoms.size(), f.atoms.size());
    for (std::size_t k = 0; k < e.atoms.size(); ++k) {
      expect_near(e.atoms[k].p, f.atoms[k].p, 1e-10);
      const QMatrix moved = u * f.atoms[k].projection * adjoint(u);
      for (int s = 0; s < static_cast<int>(n) + 2; ++s) {
        const auto x = random_vector(n, rng);
        EXPECT_LE(norm(inner(qspec::apply(e.atoms[k].projection, x), x) - inner(qspec::apply(moved, x), x)), 1e-10 * vector_norm(x) * vector_norm(x));
      }
      EXPECT_LE(diff(e.atoms[k].projection, moved), 1e-10);
    }
  }
}

TEST(SpectralCore, MeasureAxioms) {
  expect_all_pass(verify_measure_axioms(spectral_measure(diag({1.0, 2.0}))));
  Rng rng(8);
  for (int r = 0; r < 30; ++r) {
    const auto e = spectral_measure(random_normal(1 + r % 8, rng), random_imaginary_unit(rng));
    expect_all_pass(verify_measure_axioms(e, Tolerance{}, r));
  }
}

TEST(SpectralCore, PerturbedProjectionFailsTheAxioms) {
  Rng rng(9);
  auto e = spectral_measure(random_normal(4, rng));
  ASSERT_GE(e.atoms.size(), 2u);
  e.atoms[0].projection(0, 0) += 1e-3;
  const auto rep = verify_measure_axioms(e);
  EXPECT_FALSE(rep.passed());
  EXPECT_FALSE(rep.find("vi_idempotent")->pass);
  EXPECT_FALSE(rep.find("ii_total_is_identity")->pass);
}

TEST(SpectralCore, CommutantAgreesOnAlgebraAndGenericMatrices) {
  Rng rng(10);
  for (int r = 0; r < 50; ++r) {
    const auto t = random_normal(2 + r % 6, rng);
    const auto d = decompose_TABJ(t);
    EXPECT_EQ(commutant_check(t, t), std::make_pair(true, true));
    const QMatrix w = d.a * d.b * 0.5 + d.j * d.a * 2.0 - d.b * d.b + d.j * d.j * d.b + d.j;
    EXPECT_EQ(commutant_check(t, w), std::make_pair(true, true));
    EXPECT_EQ(commutant_check(t, random_matrix(t.rows(), rng)), std::make_pair(false, false));
  }
}

TEST(SpectralCore, CommutingWithEveryProjectionDoesNotForceCommutingWithJ) {
  // T = [e1] has the single projection I, which every W commutes with, while W = [e2] does not
  // commute with J = [e1]. Only "commutes with A, B, J" implies "commutes with E".
  EXPECT_EQ(commutant_check(mat({{e1}}), mat({{e2}})), std::make_pair(false, true));
}

TEST(SpectralCore, RequireConsistentCatchesBrokenMeasures) {
  auto e = spectral_measure(diag({1.0, 2.0}));
  EXPECT_NO_THROW(require_consistent(e));
  e.atoms[1].basis_index = {0};
  EXPECT_THROW(require_consistent(e), ConsistencyError);
  EXPECT_THROW(spectral_measure(mat({{1.0, 1.0}, {0.0, 2.0}})), NotNormalError);
}
