#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "qspec/qmatrix.hpp"
#include "qspec/random.hpp"
#include "test_support.hpp"

using namespace qspec;
using qspec::testing::diag;
using qspec::testing::diff;
using qspec::testing::mat;

namespace {

const Quaternion e1 = Quaternion::e1();
const Quaternion e2 = Quaternion::e2();
const Quaternion e3 = Quaternion::e3();

double cdiff(const CMatrix& a, const CMatrix& b) { return frobenius_norm(a - b); }

}  // namespace

TEST(QMatrix, ProductExamples) {
  Rng rng(1);
  const auto a = random_matrix(3, rng);
  EXPECT_EQ(diff(QMatrix::identity(3) * a, a), 0.0);
  EXPECT_EQ(mat({{e1}}) * mat({{e2}}), mat({{e3}}));
}

TEST(QMatrix, ChiIsMultiplicative) {
  Rng rng(2);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = random_matrix(n, rng);
    const auto b = random_matrix(n, rng);
    EXPECT_LE(cdiff(chi_embed(a * b), chi_embed(a) * chi_embed(b)), 1e-12 * (1 + frobenius_norm(a) * frobenius_norm(b)));
    EXPECT_LE(cdiff(chi_embed(adjoint(a)), adjoint(chi_embed(a))), 0.0);
  }
}

TEST(QMatrix, ChiBlockConvention) {
  const CMatrix c = chi_embed(mat({{e2}}));
  ASSERT_EQ(c.rows(), 2u);
  EXPECT_EQ(c(0, 0), Complex(0.0));
  EXPECT_EQ(c(0, 1), Complex(1.0));
  EXPECT_EQ(c(1, 0), Complex(-1.0));
  EXPECT_EQ(c(1, 1), Complex(0.0));
  EXPECT_EQ(cdiff(chi_embed(QMatrix::identity(3)), CMatrix::identity(6)), 0.0);
}

TEST(QMatrix, ChiRoundtripIsExact) {
  Rng rng(3);
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto a = random_matrix(n, rng);
    EXPECT_EQ(chi_extract(chi_embed(a)), a);
  }
  // a complex matrix without the quaternionic block structure is rejected
  CMatrix bad = CMatrix::identity(2);
  bad(0, 0) = Complex(2.0);
  EXPECT_THROW(chi_extract(bad), DomainError);
}

TEST(QMatrix, ChiVectorMatchesApply) {
  Rng rng(4);
  const auto a = random_matrix(4, rng);
  const auto x = random_vector(4, rng);
  const auto lhs = chi_vector(qspec::apply(a, x));
  const auto w = chi_vector(x);
  const CMatrix c = chi_embed(a);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    Complex acc{};
    for (std::size_t k = 0; k < w.size(); ++k) acc += c(i, k) * w[k];
    EXPECT_LE(std::abs(acc - lhs[i]), 1e-13);
  }
  const auto back = chi_unvector(w);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(back[i], x[i]);
}

TEST(QMatrix, AdjointPairing) {
  EXPECT_EQ(adjoint(QMatrix::identity(2)), QMatrix::identity(2));
  EXPECT_EQ(adjoint(mat({{e1}})), mat({{-e1}}));
  Rng rng(5);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = random_matrix(n, rng);
    const auto x = random_vector(n, rng);
    const auto y = random_vector(n, rng);
    EXPECT_LE(norm(inner(qspec::apply(a, x), y) - inner(x, qspec::apply(adjoint(a), y))), 1e-12 * (1 + frobenius_norm(a)));
  }
}

TEST(QMatrix, InnerProductConvention) {
  Rng rng(6);
  const auto x = random_vector(3, rng);
  const auto y = random_vector(3, rng);
  const auto a = random_quaternion(rng);
  // scalars come out on the right of the first slot, conjugated on the second
  EXPECT_LE(norm(inner(scale_right(x, a), y) - inner(x, y) * a), 1e-13);
  EXPECT_LE(norm(inner(x, scale_right(y, a)) - conj(a) * inner(x, y)), 1e-13);
  EXPECT_LE(norm(inner(x, y) - conj(inner(y, x))), 1e-14);
  EXPECT_NEAR(inner(x, x).s0, vector_norm(x) * vector_norm(x), 1e-13);
}

TEST(QMatrix, RightLinearity) {
  Rng rng(7);
  const auto a = random_matrix(4, rng);
  const auto x = random_vector(4, rng);
  const auto y = random_vector(4, rng);
  const auto al = random_quaternion(rng);
  const auto be = random_quaternion(rng);
  QVector comb(4);
  for (std::size_t i = 0; i < 4; ++i) comb[i] = x[i] * al + y[i] * be;
  const auto lhs = qspec::apply(a, comb);
  const auto ax = qspec::apply(a, x);
  const auto ay = qspec::apply(a, y);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(norm(lhs[i] - (ax[i] * al + ay[i] * be)), 1e-13 * 10);
  const auto zero = qspec::apply(a, QVector(4));
  for (const auto& q : zero) EXPECT_EQ(q, Quaternion());
  const auto same = qspec::apply(QMatrix::identity(4), x);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(same[i], x[i]);
}

TEST(QMatrix, OperatorNorm) {
  EXPECT_EQ(operator_norm(QMatrix(3, 3)), 0.0);
  EXPECT_NEAR(operator_norm(mat({{e3 * 2.0}})), 2.0, 1e-15);
  Rng rng(8);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = random_matrix(n, rng);
    const double na = operator_norm(a);
    double best = 0.0;
    for (int s = 0; s < 500; ++s) {
      auto x = random_vector(n, rng);
      const double nx = vector_norm(x);
      for (auto& q : x) q = q / nx;
      const double r = vector_norm(qspec::apply(a, x));
      EXPECT_LE(r, na + 1e-10);
      best = std::max(best, r);
    }
    // the maximizer is the top right singular vector
    const auto svd = jacobi_svd(a);
    EXPECT_NEAR(vector_norm(qspec::apply(a, svd.v.column(0))), na, 1e-8 * std::max(1.0, na));
    EXPECT_LE(best, na + 1e-10);
  }
}

TEST(QMatrix, Classify) {
  const auto id = classify(QMatrix::identity(3));
  EXPECT_TRUE(id.hermitian && id.unitary && id.normal && id.positive);
  EXPECT_FALSE(id.anti_hermitian);
  const auto c = classify(mat({{e1}}));
  EXPECT_TRUE(c.anti_hermitian && c.unitary && c.normal);
  EXPECT_FALSE(c.hermitian);
  Rng rng(9);
  const auto g = random_matrix(4, rng);
  EXPECT_TRUE(classify(adjoint(g) * g).positive);
  EXPECT_FALSE(classify(mat({{1.0, 1.0}, {0.0, 2.0}})).normal);
}

TEST(QMatrix, NormalityThresholdIsRelative) {
  Rng rng(10);
  const auto t = random_normal(4, rng, 1e3);
  EXPECT_TRUE(is_normal(t));
  const double nt = operator_norm(t);
  const QMatrix c = t * adjoint(t) - adjoint(t) * t;
  EXPECT_EQ(is_normal(t), operator_norm(c) <= kStructureTol * nt * nt);
}

TEST(QMatrix, HermitianEigenExamples) {
  const auto d = hermitian_eigen(diag({1.0, 2.0}));
  ASSERT_EQ(d.values.size(), 2u);
  EXPECT_NEAR(d.values[0], 1.0, 1e-15);
  EXPECT_NEAR(d.values[1], 2.0, 1e-15);
  EXPECT_NEAR(norm(d.vectors[0][0]), 1.0, 1e-15);
  EXPECT_NEAR(norm(d.vectors[1][1]), 1.0, 1e-15);

  const auto h = hermitian_eigen(mat({{0.0, e1}, {-e1, 0.0}}));
  EXPECT_NEAR(h.values[0], -1.0, 1e-14);
  EXPECT_NEAR(h.values[1], 1.0, 1e-14);
  EXPECT_THROW(hermitian_eigen(mat({{e1}})), DomainError);
}

TEST(QMatrix, HermitianEigenSynthesisAndInvariance) {
  Rng rng(11);
  for (std::size_t n = 1; n <= 7; ++n) {
    const auto a = random_hermitian(n, rng);
    const auto d = hermitian_eigen(a);
    QMatrix synth(n, n);
    for (std::size_t k = 0; k < n; ++k) synth += outer_scaled<Quaternion>(d.vectors[k], Quaternion(d.values[k]));
    EXPECT_LE(diff(synth, a), 1e-10 * std::max(1.0, operator_norm(a)));
    const auto u = random_unitary(n, rng);
    const auto d2 = hermitian_eigen(adjoint(u) * a * u);
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(d.values[k], d2.values[k], 1e-10 * std::max(1.0, operator_norm(a)));
  }
}

TEST(QMatrix, SqrtPositive) {
  EXPECT_LE(diff(sqrt_positive(diag({4.0, 9.0})), diag({2.0, 3.0})), 1e-15);
  EXPECT_LE(diff(sqrt_positive(QMatrix::identity(3)), QMatrix::identity(3)), 1e-15);
  EXPECT_THROW(sqrt_positive(diag({1.0, -1.0})), DomainError);
  Rng rng(12);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto g = random_matrix(n, rng);
    const auto p = adjoint(g) * g;
    const auto r = sqrt_positive(p);
    EXPECT_LE(diff(r * r, p), 1e-9 * std::max(1.0, operator_norm(p)));
    EXPECT_LE(diff(r, adjoint(r)), 1e-12 * std::max(1.0, operator_norm(r)));
  }
}

TEST(QMatrix, AbsOp) {
  EXPECT_LE(diff(abs_op(mat({{-3.0}})), mat({{3.0}})), 1e-15);
  EXPECT_LE(diff(abs_op(mat({{e1 * 2.0}})), mat({{2.0}})), 1e-15);
  Rng rng(13);
  const auto u = random_unitary(4, rng);
  EXPECT_LE(diff(abs_op(u), QMatrix::identity(4)), 1e-12);
  const auto w = random_matrix(5, rng);
  EXPECT_LE(diff(abs_op(w), sqrt_positive(adjoint(w) * w)), 1e-9 * operator_norm(w));
}

TEST(QMatrix, InverseAndSchurOfChi) {
  Rng rng(14);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto a = random_matrix(n, rng);
    EXPECT_LE(diff(a * inverse(a), QMatrix::identity(n)), 1e-10 * n);
    const CMatrix c = chi_embed(a);
    const auto s = complex_schur(c);
    EXPECT_LE(cdiff(s.z * s.t * adjoint(s.z), c), 1e-12 * std::max(1.0, frobenius_norm(c)));
    EXPECT_LE(cdiff(adjoint(s.z) * s.z, CMatrix::identity(2 * n)), 1e-12 * n);
    for (std::size_t i = 0; i < 2 * n; ++i)
      for (std::size_t k = 0; k < i; ++k) EXPECT_EQ(s.t(i, k), Complex(0.0));
  }
  EXPECT_THROW(inverse(mat({{1.0, 1.0}, {1.0, 1.0}})), SingularError);
}
