#include "groupoid_effect/errors.hpp"
#include "groupoid_effect/numlin.hpp"
#include "groupoid_effect/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ge;

namespace {

Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST(NumericRank, CountsIndependentColumns) {
  Matrix a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  EXPECT_EQ(numeric_rank(a), 2);
  EXPECT_EQ(numeric_rank(Matrix::Zero(4, 2)), 0);
  EXPECT_EQ(numeric_rank(Matrix::Identity(5, 5)), 5);
}

TEST(NumericRank, ThresholdIsRelativeToScale) {
  Matrix a = Matrix::Identity(2, 2);
  a(1, 1) = 1e-12;
  EXPECT_EQ(numeric_rank(a), 1);
  EXPECT_EQ(numeric_rank(Matrix(a * 1e-6)), 1);
  a(1, 1) = 1e-6;
  EXPECT_EQ(numeric_rank(a), 2);
}

TEST(NullSpace, IsOrthonormalKernel) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 2, 5);
    const Matrix n = null_space(a);
    ASSERT_EQ(n.cols(), 3);
    EXPECT_LT((a * n).norm(), 1e-12);
    EXPECT_LT((n.transpose() * n - Matrix::Identity(3, 3)).norm(), 1e-12);
  }
}

TEST(PseudoInverse, SatisfiesPenroseConditions) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_matrix(rng, 4, 2) * random_matrix(rng, 2, 3);  // rank 2
    const Matrix p = pseudo_inverse(a);
    EXPECT_LT((a * p * a - a).norm(), 1e-10);
    EXPECT_LT((p * a * p - p).norm(), 1e-10);
    EXPECT_LT(((a * p).transpose() - a * p).norm(), 1e-10);
  }
}

TEST(ColumnSpace, AbsoluteFloorDropsTinyDirections) {
  Matrix a = Matrix::Zero(3, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1e-9;
  EXPECT_EQ(column_space(a).dim(), 2);
  EXPECT_EQ(column_space(a, {}, 1e-8).dim(), 1);
}

TEST(CanonicalBasis, IndependentOfRotationWithinSubspace) {
  Rng rng(3);
  Matrix q = Matrix::Zero(4, 2);
  q(0, 0) = 1;
  q(2, 1) = 1;
  const Matrix ref = canonical_basis(q);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = rng.uniform(-3, 3);
    Matrix r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    EXPECT_LT((canonical_basis(q * r) - ref).norm(), 1e-12);
  }
  EXPECT_LT((ref - q).norm(), 1e-12);
}

TEST(QuotientSpace, ComplementIsOrthogonalToLongitudinal) {
  Matrix l = Matrix::Zero(3, 1);
  l(1, 0) = 1;
  const QuotientSpace q(Subspace::full(3), Subspace(l));
  EXPECT_EQ(q.dim(), 2);
  EXPECT_LT((l.transpose() * q.complement()).norm(), 1e-14);
}

TEST(InducedQuotientMap, RejectsMapsThatMoveTheLongitudinal) {
  Matrix l = Matrix::Zero(2, 1);
  l(0, 0) = 1;
  const QuotientSpace q(Subspace::full(2), Subspace(l));
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_THROW(induced_quotient_map(swap, q, q), NotWellDefinedError);
  Matrix shear(2, 2);
  shear << 1, 5, 0, 3;
  const QuotientLinearMap m = induced_quotient_map(shear, q, q);
  ASSERT_EQ(m.matrix.rows(), 1);
  EXPECT_NEAR(m.matrix(0, 0), 3.0, 1e-14);
}

TEST(Conditioning, SingularValuesAndCondition) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 0.5;
  EXPECT_DOUBLE_EQ(condition_number(a), 8.0);
  EXPECT_DOUBLE_EQ(min_singular_value(a), 0.5);
  EXPECT_DOUBLE_EQ(spectral_norm(a), 4.0);
  EXPECT_TRUE(std::isinf(condition_number(Matrix::Zero(2, 2))));
}

TEST(PrincipalAngles, DistanceBetweenLines) {
  Matrix a = Matrix::Zero(2, 1), b = Matrix::Zero(2, 1);
  a(0, 0) = 1;
  b(0, 0) = std::cos(0.3);
  b(1, 0) = std::sin(0.3);
  EXPECT_NEAR(subspace_distance(Subspace(a), Subspace(b)), 0.3, 1e-12);
  EXPECT_NEAR(subspace_distance(Subspace(a), Subspace::full(2)), M_PI / 2, 1e-12);
}

TEST(ToleranceProfile, OverridesAndValidation) {
  const ToleranceProfile t = ToleranceProfile::with_overrides({}, "map_abs_tol=1e-9,fd_step=1e-5");
  EXPECT_DOUBLE_EQ(t.map_abs_tol, 1e-9);
  EXPECT_DOUBLE_EQ(t.fd_step, 1e-5);
  EXPECT_THROW(ToleranceProfile::with_overrides({}, "nope=1"), InputError);
  EXPECT_THROW(ToleranceProfile::with_overrides({}, "map_abs_tol=x"), InputError);
  EXPECT_THROW(ToleranceProfile::with_overrides({}, "map_abs_tol=1,fd_abs_tol=1e-3"), InputError);
}

TEST(Rng, SequencesAreReproducibleAndForksIndependent) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform01(), b.uniform01());
  Rng c(42);
  Rng child = c.fork();
  Rng d(42);
  Rng child2 = d.fork();
  EXPECT_EQ(child.normal(), child2.normal());
  EXPECT_EQ(c.uniform01(), d.uniform01());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(a.index(7), 7u);
  }
}
