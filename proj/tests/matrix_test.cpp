#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "daecert/core/matrix.hpp"

using daecert::Matrix;
using daecert::Vector;

namespace {

Matrix random_matrix(std::mt19937& rng, int r, int c) {
  std::normal_distribution<double> d;
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// Smallest root of det(S − λI) for symmetric 3×3 S (trigonometric form).
double cubic_min_root(const Matrix& s) {
  const double q = s.trace() / 3.0;
  const double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  const double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
                    (s(2, 2) - q) * (s(2, 2) - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Matrix b = (s - q * Matrix::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  return q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
}

}  // namespace

TEST(NullSpace, SingleRowHasOneDimensionalKernel) {
  Matrix m(1, 2);
  m << 1, 1;
  Matrix q = daecert::null_space_orthonormal(m, 1e-10);
  ASSERT_EQ(q.cols(), 1);
  EXPECT_NEAR(std::fabs(q(0, 0)), 1 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(q(0, 0), -q(1, 0), 1e-14);
}

TEST(NullSpace, ZeroMatrixGivesOrthogonalBasis) {
  Matrix q = daecert::null_space_orthonormal(Matrix::Zero(2, 2), 1e-10);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LT((q.transpose() * q - Matrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(NullSpace, ShiftDirectionReductionBasis) {
  Matrix m = Matrix::Zero(1, 20);
  m.leftCols(10).setOnes();
  Matrix q = daecert::null_space_orthonormal(m, 1e-10);
  ASSERT_EQ(q.rows(), 20);
  ASSERT_EQ(q.cols(), 19);
  EXPECT_LT((m * q).norm(), 1e-13);
  EXPECT_LT((q.transpose() * q - Matrix::Identity(19, 19)).norm(), 1e-13);
}

TEST(NullSpace, PropertyOnRandomRankDeficientMatrices) {
  std::mt19937 rng(7);
  const double tol = 1e-10;
  for (int t = 0; t < 20; ++t) {
    const int r = 1 + t % 4;
    Matrix m = random_matrix(rng, 6, r) * random_matrix(rng, r, 8);
    Matrix q = daecert::null_space_orthonormal(m, tol);
    EXPECT_EQ(q.cols(), 8 - r);
    EXPECT_LE((q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm(), 10 * tol);
    EXPECT_LE((m * q).norm(), 10 * tol * m.norm());
  }
}

TEST(NullSpace, TrivialKernelIsEmpty) {
  Matrix q = daecert::null_space_orthonormal(Matrix::Identity(3, 3), 1e-10);
  EXPECT_EQ(q.rows(), 3);
  EXPECT_EQ(q.cols(), 0);
}

TEST(TruncatedSvd, RankOneIsExact) {
  Vector u(3), v(2);
  u << 1, -2, 0.5;
  v << 3, 1;
  Matrix m = u * v.transpose();
  auto t = daecert::truncated_svd(m, 1);
  EXPECT_LT((t.reconstruct() - m).norm(), 1e-13);
}

TEST(TruncatedSvd, IdentityRankOne) {
  auto t = daecert::truncated_svd(Matrix::Identity(2, 2), 1);
  ASSERT_EQ(t.s.size(), 1);
  EXPECT_NEAR(t.s(0), 1.0, 1e-15);
  Eigen::JacobiSVD<Matrix> r(Matrix::Identity(2, 2) - t.reconstruct());
  EXPECT_NEAR(r.singularValues()(0), 1.0, 1e-14);
}

TEST(TruncatedSvd, ResidualMatchesDiscardedSpectrum) {
  std::mt19937 rng(11);
  Matrix m = random_matrix(rng, 6, 4);
  auto t = daecert::truncated_svd(m, 2);
  // Oracle: singular values as square roots of eig(MᵀM).
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  const Vector ev = es.eigenvalues();  // ascending
  const double expected = ev(0) + ev(1);
  EXPECT_NEAR((m - t.reconstruct()).squaredNorm(), expected, 1e-10 * (1 + expected));
  EXPECT_LT((t.u.transpose() * t.u - Matrix::Identity(2, 2)).norm(), 1e-13);
  EXPECT_LT((t.v.transpose() * t.v - Matrix::Identity(2, 2)).norm(), 1e-13);
  EXPECT_GE(t.s(0), t.s(1));
}

TEST(TruncatedSvd, FullRankReconstructs) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = random_matrix(rng, 5 + trial % 3, 4);
    auto t = daecert::truncated_svd(m, 4);
    EXPECT_LE((t.reconstruct() - m).norm(), 1e-12 * m.norm());
  }
}

TEST(TruncatedSvd, RankOutOfRangeThrows) {
  EXPECT_THROW(daecert::truncated_svd(Matrix::Identity(2, 3), 3), daecert::InputError);
}

TEST(MinEigenvalue, Examples) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  EXPECT_DOUBLE_EQ(daecert::min_eigenvalue_sym(d), 1.0);
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  EXPECT_NEAR(daecert::min_eigenvalue_sym(daecert::SymmetricMatrix(s)), -1.0, 1e-15);
}

TEST(MinEigenvalue, CubicRootOracle) {
  std::mt19937 rng(13);
  for (int t = 0; t < 10; ++t) {
    Matrix a = random_matrix(rng, 3, 3);
    Matrix s = a + a.transpose();
    EXPECT_NEAR(daecert::min_eigenvalue_sym(s), cubic_min_root(s), 1e-11);
  }
}

TEST(MinEigenvalue, BelowRayleighQuotients) {
  std::mt19937 rng(14);
  Matrix a = random_matrix(rng, 5, 5);
  Matrix s = a + a.transpose();
  const double lmin = daecert::min_eigenvalue_sym(s);
  for (int t = 0; t < 100; ++t) {
    Vector x = random_matrix(rng, 5, 1);
    x.normalize();
    EXPECT_LE(lmin, x.dot(s * x) + 1e-12);
  }
}

TEST(SymmetricMatrix, MirrorsUpperTriangle) {
  Matrix m(2, 2);
  m << 1, 2, 5, 3;
  daecert::SymmetricMatrix s(m);
  EXPECT_EQ(s.full(), s.full().transpose());
  EXPECT_DOUBLE_EQ(s(1, 0), 2.0);
  EXPECT_THROW(daecert::SymmetricMatrix(Matrix::Zero(2, 3)), daecert::InputError);
}
