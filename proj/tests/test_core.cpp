// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <vector>

#include "multivec/core.hpp"

namespace multivec {
namespace {

Matrix random_spd(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = nd(gen);
  }
  return b.transpose() * b + Matrix::Identity(n, n);
}

TEST(SpdFactorize, IdentityHasZeroLogdet) {
  EXPECT_EQ(spd_factorize(Matrix::Identity(3, 3)).logdet(), 0.0);
}

TEST(SpdFactorize, DiagonalLogdet) {
  Matrix s = Eigen::Vector2d(2.0, 8.0).asDiagonal();
  EXPECT_NEAR(spd_factorize(s).logdet(), std::log(16.0), 1e-15);
  EXPECT_NEAR(spd_factorize(s).logdet(), 2.772588722239781, 1e-12);
}

TEST(SpdFactorize, LogdetMatchesEigenvalues) {
  std::mt19937_64 gen(42);
  for (int n : {1, 2, 5, 12}) {
    Matrix a = random_spd(n, gen);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    double ref = es.eigenvalues().array().log().sum();
    EXPECT_NEAR(spd_factorize(a).logdet(), ref, 1e-9) << "n=" << n;
  }
}

TEST(SpdFactorize, ScaledIdentity) {
  for (double c : {0.01, 0.5, 3.0, 1e4}) {
    for (int n : {1, 3, 7}) {
      Matrix s = c * Matrix::Identity(n, n);
      EXPECT_NEAR(spd_factorize(s).logdet(), n * std::log(c), 1e-12);
    }
  }
}

TEST(SpdFactorize, SolveResidual) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + trial % 8;
    Matrix a = random_spd(n, gen);
    Vector b(n);
    for (int i = 0; i < n; ++i) b(i) = nd(gen);
    Vector x = spd_factorize(a).solve(b);
    EXPECT_LE((a * x - b).norm() / b.norm(), 1e-10);
  }
}

TEST(SpdFactorize, RejectsIndefinite) {
  Matrix s(2, 2);
  s << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(spd_factorize(s), NotPositiveDefinite);
  Matrix z = Matrix::Zero(2, 2);
  EXPECT_THROW(spd_factorize(z), NotPositiveDefinite);
}

TEST(SpdFactorize, RejectsAsymmetric) {
  Matrix s(2, 2);
  s << 2.0, 0.5, 0.4, 2.0;
  EXPECT_THROW(spd_factorize(s), PreconditionError);
  Matrix t = Matrix::Identity(2, 2);
  t(0, 1) = 1e-13;  // within tolerance
  EXPECT_NO_THROW(spd_factorize(t));
}

MvEllipticalParams make_params(std::vector<int> dims,
                               std::vector<Matrix> sigmas) {
  MvEllipticalParams p;
  p.partition.dims = dims;
  for (int d : dims) p.mus.push_back(Vector::Zero(d));
  p.sigmas = std::move(sigmas);
  return p;
}

TEST(BlockQuadform, ZeroAtLocation) {
  MvEllipticalParams p = make_params({2}, {Matrix::Identity(2, 2)});
  p.mus[0] = Eigen::Vector2d(1.5, -2.0);
  EXPECT_EQ(block_quadform(p, Eigen::Vector2d(1.5, -2.0)), 0.0);
}

TEST(BlockQuadform, EuclideanNorm) {
  MvEllipticalParams p = make_params({2}, {Matrix::Identity(2, 2)});
  EXPECT_NEAR(block_quadform(p, Eigen::Vector2d(3.0, 4.0)), 25.0, 1e-13);
}

TEST(BlockQuadform, BlockSum) {
  MvEllipticalParams p =
      make_params({1, 1}, {Matrix::Constant(1, 1, 4.0), Matrix::Ones(1, 1)});
  EXPECT_NEAR(block_quadform(p, Eigen::Vector2d(2.0, 3.0)), 10.0, 1e-13);
}

TEST(BlockQuadform, NonNegativeAndZeroOnlyAtMu) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  MvEllipticalParams p =
      make_params({2, 3}, {random_spd(2, gen), random_spd(3, gen)});
  for (auto& m : p.mus) {
    for (int i = 0; i < m.size(); ++i) m(i) = nd(gen);
  }
  for (int t = 0; t < 50; ++t) {
    Vector x(5);
    for (int i = 0; i < 5; ++i) x(i) = nd(gen);
    EXPECT_GT(block_quadform(p, x), 0.0);
  }
  Vector mu(5);
  mu << p.mus[0], p.mus[1];
  EXPECT_NEAR(block_quadform(p, mu), 0.0, 1e-28);
}

TEST(BlockQuadform, DimensionMismatch) {
  MvEllipticalParams p = make_params({2}, {Matrix::Identity(2, 2)});
  EXPECT_THROW(block_quadform(p, Eigen::Vector3d(1, 2, 3)), DimensionMismatch);
}

TEST(ValidatePartition, SplitsBlocks) {
  Partition p{{1, 1}, std::nullopt};
  auto b = validate_partition(p, Eigen::Vector2d(4.0, 5.0));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0](0), 4.0);
  EXPECT_EQ(b[1](0), 5.0);

  Partition q{{2, 3}, std::nullopt};
  Vector x(5);
  x << 1, 2, 3, 4, 5;
  auto c = validate_partition(q, x);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].size(), 2);
  EXPECT_EQ(c[1].size(), 3);
  EXPECT_EQ(c[1](2), 5.0);

  EXPECT_THROW(validate_partition(q, Eigen::Vector4d(1, 2, 3, 4)), DimensionMismatch);
}

TEST(Partition, Validation) {
  EXPECT_THROW((Partition{{}, std::nullopt}.validate()), ParameterOutOfDomain);
  EXPECT_THROW((Partition{{1, 0}, std::nullopt}.validate()),
               ParameterOutOfDomain);
  EXPECT_THROW((Partition{{1}, 0}.validate()), ParameterOutOfDomain);
  EXPECT_NO_THROW((Partition{{1, 2}, 3}.validate()));
}

TEST(ExtendedShape, AlphaStarIsSum) {
  ExtendedShape s{{0.5, 1.25, 2.0}, 0.75};
  EXPECT_EQ(s.alpha_star(), 4.5);
  ExtendedShape bad{{1.0, -1.0}, 1.0};
  EXPECT_THROW(bad.validate(), ParameterOutOfDomain);
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  std::vector<double> xs{1.0, 1e100, 1.0, -1e100};
  EXPECT_EQ(compensated_sum(xs), 2.0);
}

}  // namespace
}  // namespace multivec
