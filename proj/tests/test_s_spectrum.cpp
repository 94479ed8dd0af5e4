#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "qspec/random.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/verify.hpp"
#include "test_support.hpp"

using namespace qspec;
using qspec::testing::diag;
using qspec::testing::diff;
using qspec::testing::mat;

namespace {

const Quaternion e1 = Quaternion::e1();
const Quaternion e2 = Quaternion::e2();

void expect_near(const Quaternion& a, const Quaternion& b, double tol) {
  EXPECT_LE(distance(a, b), tol) << a << " vs " << b;
}

// Random complex numbers in C_{e1}, as quaternions.
Quaternion random_c_e1(Rng& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), 0.0, 0.0};
}

}  // namespace

TEST(SSpectrum, PseudoResolventExamples) {
  EXPECT_EQ(diff(pseudo_resolvent(QMatrix::identity(2), 1.0), QMatrix(2, 2)), 0.0);
  EXPECT_EQ(diff(pseudo_resolvent(QMatrix::identity(2), 3.0), QMatrix::identity(2) * 4.0), 0.0);
  EXPECT_EQ(diff(pseudo_resolvent(mat({{e1}}), e2), QMatrix(1, 1)), 0.0);
}

TEST(SSpectrum, PseudoResolventDependsOnlyOnTheSphere) {
  Rng rng(1);
  for (int r = 0; r < 50; ++r) {
    const auto t = random_matrix(3, rng);
    const auto s = random_quaternion(rng);
    const auto j = random_imaginary_unit(rng);
    const double scale = std::max(1.0, operator_norm(t) * operator_norm(t) + norm2(s));
    EXPECT_LE(diff(pseudo_resolvent(t, s), pseudo_resolvent(t, sphere_representative(s, j))), 1e-14 * scale);
  }
}

TEST(SSpectrum, ResolventSetMembership) {
  EXPECT_FALSE(in_s_resolvent_set(QMatrix::identity(2), 1.0));
  EXPECT_TRUE(in_s_resolvent_set(QMatrix::identity(2), 3.0));
  Rng rng(2);
  for (int r = 0; r < 20; ++r) EXPECT_FALSE(in_s_resolvent_set(mat({{e1}}), random_imaginary_unit(rng)));
}

TEST(SSpectrum, Examples) {
  const auto d = s_spectrum(diag({1.0, 2.0}));
  ASSERT_EQ(d.spheres.size(), 2u);
  expect_near(d.spheres[0].rep, 1.0, 1e-14);
  expect_near(d.spheres[1].rep, 2.0, 1e-14);
  EXPECT_EQ(d.spheres[0].multiplicity, 1);
  EXPECT_EQ(d.spheres[1].multiplicity, 1);
  EXPECT_TRUE(d.normal);

  const auto s1 = s_spectrum(mat({{e1}}));
  ASSERT_EQ(s1.spheres.size(), 1u);
  expect_near(s1.spheres[0].rep, e1, 1e-14);
  EXPECT_EQ(s1.spheres[0].multiplicity, 1);

  const auto rot = s_spectrum(mat({{0.0, 1.0}, {-1.0, 0.0}}));
  ASSERT_EQ(rot.spheres.size(), 1u);
  expect_near(rot.spheres[0].rep, e1, 1e-14);
  EXPECT_EQ(rot.spheres[0].multiplicity, 2);
  ASSERT_TRUE(rot.spheres[0].projection);
  EXPECT_LE(diff(*rot.spheres[0].projection, QMatrix::identity(2)), 1e-14);
}

TEST(SSpectrum, RepresentativeFollowsTheChosenSlice) {
  Rng rng(3);
  const auto t = mat({{e2 * 2.0 + 1.0}});
  for (int r = 0; r < 10; ++r) {
    const auto j = random_imaginary_unit(rng);
    const auto s = s_spectrum(t, j);
    ASSERT_EQ(s.spheres.size(), 1u);
    expect_near(s.spheres[0].rep, Quaternion(1.0) + Quaternion(j) * 2.0, 1e-14);
    ASSERT_EQ(s.spheres[0].vectors.size(), 1u);
    const auto& y = s.spheres[0].vectors[0];
    EXPECT_LE(norm(t(0, 0) * y[0] - y[0] * s.spheres[0].rep), 1e-14);
  }
}

TEST(SSpectrum, NonNormalHasMultiplicitiesButNoProjections) {
  const auto s = s_spectrum(mat({{1.0, 1.0}, {0.0, 1.0}}));
  EXPECT_FALSE(s.normal);
  ASSERT_EQ(s.spheres.size(), 1u);
  EXPECT_EQ(s.spheres[0].multiplicity, 2);
  EXPECT_FALSE(s.spheres[0].projection);
  EXPECT_TRUE(s.spheres[0].vectors.empty());
}

TEST(SSpectrum, RandomNormalProjectionsAndEigenvectors) {
  Rng rng(4);
  for (int r = 0; r < 60; ++r) {
    const std::size_t n = 1 + r % 8;
    const auto t = random_normal(n, rng, 1.0 + r);
    const auto j = random_imaginary_unit(rng);
    const auto spec = s_spectrum(t, j);
    const auto rep = check_spectrum(t, spec, Tolerance{});
    EXPECT_TRUE(rep.passed());
    for (const auto& it : rep.items()) EXPECT_TRUE(it.pass) << it.name << " " << it.value;
  }
}

TEST(SSpectrum, RepeatedSpheresMerge) {
  Rng rng(5);
  // three copies of the sphere of 1 + 2 e1 placed at different points of it, plus a real atom
  std::vector<Quaternion> d;
  for (int r = 0; r < 3; ++r) {
    const auto a = random_unit_quaternion(rng);
    d.push_back(a * Quaternion(1, 2, 0, 0) * conj(a));
  }
  d.push_back(-0.5);
  const auto t = conjugate_diagonal(random_unitary(4, rng), d);
  const auto s = s_spectrum(t);
  ASSERT_EQ(s.spheres.size(), 2u);
  EXPECT_EQ(s.spheres[0].multiplicity, 1);
  EXPECT_EQ(s.spheres[1].multiplicity, 3);
  expect_near(s.spheres[1].rep, Quaternion(1, 2, 0, 0), 1e-12);
  EXPECT_FALSE(s.odd_cluster);
}

TEST(SSpectrum, AxialSymmetry) {
  Rng rng(6);
  for (int r = 0; r < 20; ++r) {
    const auto t = random_normal(1 + r % 6, rng);
    const auto spec = s_spectrum(t);
    const auto rep = check_axial_symmetry(t, spec, rng, 20);
    for (const auto& it : rep.items()) EXPECT_EQ(it.value, 0.0) << it.name;
  }
}

TEST(SSpectrum, LeftResolventExamples) {
  EXPECT_LE(diff(s_resolvent_left(QMatrix(2, 2), 1.0), QMatrix::identity(2)), 1e-15);
  EXPECT_LE(diff(s_resolvent_left(diag({1.0}), 3.0), mat({{0.5}})), 1e-15);
  // (3 - 4 e1)^{-1} (2 - e1) = (2 - e1)^{-1} = 0.4 + 0.2 e1
  expect_near(s_resolvent_left(mat({{e1}}), 2.0)(0, 0), Quaternion(0.4, 0.2, 0, 0), 1e-15);
  EXPECT_LE(diff(s_resolvent_right(QMatrix(2, 2), 1.0), QMatrix::identity(2)), 1e-15);
  EXPECT_THROW(s_resolvent_left(QMatrix::identity(2), 1.0), SingularError);
  EXPECT_THROW(s_resolvent_right(mat({{e1}}), e2), SingularError);
}

TEST(SSpectrum, ResolventsReduceToTheInverseWhenEverythingCommutes) {
  // T diagonal in C_e1 and s in C_e1: both resolvents equal (s I - T)^{-1}
  Rng rng(7);
  for (int r = 0; r < 30; ++r) {
    std::vector<Quaternion> d(4);
    for (auto& q : d) q = random_c_e1(rng);
    const auto t = QMatrix::diagonal(d);
    const auto s = random_c_e1(rng) * 3.0;
    QMatrix expected(4, 4);
    for (std::size_t i = 0; i < 4; ++i) expected(i, i) = inverse(s - d[i]);
    const double scale = std::max(1.0, operator_norm(expected));
    EXPECT_LE(diff(s_resolvent_left(t, s), expected), 1e-12 * scale);
    EXPECT_LE(diff(s_resolvent_right(t, s), expected), 1e-12 * scale);
  }
}

TEST(SSpectrum, RightResolventOfRealDiagonalMatchesLeft) {
  const auto t = diag({1.0, -2.0, 0.5});
  EXPECT_LE(diff(s_resolvent_left(t, 3.0), s_resolvent_right(t, 3.0)), 1e-15);
}

TEST(SSpectrum, RightResolventBoundFarFromSpectrum) {
  // for normal T, ||S_R^{-1}(s, T)|| <= 1 / dist(s, sigma_S(T)) up to rounding
  Rng rng(8);
  for (int r = 0; r < 30; ++r) {
    const auto t = random_normal(1 + r % 5, rng);
    const auto spec = s_spectrum(t);
    const auto s = sample_off_spectrum(spec, 3.0, 0.5, rng);
    EXPECT_LE(operator_norm(s_resolvent_right(t, s)), (1.0 + 1e-10) / distance_to_spectrum(s, spec));
  }
}

TEST(SSpectrum, ResolventEquation) {
  const auto z = check_resolvent_equation(QMatrix(2, 2), 1.0, 2.0);
  EXPECT_LE(z.residual, 1e-12);
  EXPECT_THROW(check_resolvent_equation(mat({{2.0}}), e1, e2), DomainError);
  Rng rng(9);
  for (int r = 0; r < 30; ++r) {
    const auto t = random_normal(1 + r % 6, rng, 1.0 + r % 4);
    const auto spec = s_spectrum(t);
    EXPECT_LE(worst_resolvent_residual(t, spec, rng, 3), 1e-9 * std::max(1.0, operator_norm(t)));
  }
}

TEST(SSpectrum, BoundCheck) {
  EXPECT_TRUE(spectrum_bound_check(mat({{e1}})).passed());
  const auto pos = spectrum_bound_check(diag({1.0, 2.0}));
  EXPECT_TRUE(pos.passed());
  EXPECT_NE(pos.find("positive_min_real"), nullptr);
  Rng rng(10);
  for (int r = 0; r < 10; ++r) {
    const auto h = spectrum_bound_check(random_hermitian(1 + r % 6, rng));
    EXPECT_TRUE(h.passed());
    ASSERT_NE(h.find("hermitian_imag_part"), nullptr);
    EXPECT_LE(h.find("hermitian_imag_part")->value, 1e-10);
  }
}
