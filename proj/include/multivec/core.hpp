// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_CORE_HPP_
#define MULTIVEC_CORE_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multivec/errors.hpp"

namespace multivec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Block structure of a multivector: k contiguous blocks of sizes dims[i].
/// n0 is the auxiliary (denominator) block dimension of the t and Pearson II
/// families.
struct Partition {
  std::vector<int> dims;
  std::optional<int> n0;

  int k() const { return static_cast<int>(dims.size()); }
  int total() const;
  void validate() const;
};

/// Real shape parameters alpha_1..alpha_k plus the auxiliary alpha_0.
struct ExtendedShape {
  std::vector<double> alphas;
  double alpha0 = 1.0;

  double alpha_star() const;
  void validate() const;
};

/// Cholesky factorization of a symmetric positive definite matrix.
class SpdFactor {
 public:
  SpdFactor() = default;
  explicit SpdFactor(const Matrix& s);

  double logdet() const { return logdet_; }
  int dim() const { return static_cast<int>(llt_.matrixLLT().rows()); }
  Vector solve(const Vector& b) const { return llt_.solve(b); }
  /// (x)^T S^{-1} x, computed through the triangular factor.
  double quadform(const Eigen::Ref<const Vector>& x) const;
  /// Lower triangular L with S = L L^T.
  Matrix lower() const { return llt_.matrixL(); }

 private:
  Eigen::LLT<Matrix> llt_;
  double logdet_ = 0.0;
};

/// Factorizes S; throws NotPositiveDefinite for a non-positive pivot and
/// PreconditionError when S is not symmetric within 1e-12 (relative to its
/// largest entry).
SpdFactor spd_factorize(const Matrix& s);

/// Location vectors and block-diagonal scale matrices of the vector
/// families.
struct MvEllipticalParams {
  Partition partition;
  std::vector<Vector> mus;
  std::vector<Matrix> sigmas;

  void validate() const;
};

/// Per-block factorizations cached for repeated density evaluation.
struct BlockFactors {
  std::vector<SpdFactor> factors;
  double logdet_sum = 0.0;
};

BlockFactors factorize_blocks(const MvEllipticalParams& p);

/// Splits x into contiguous blocks of the partition's dimensions.
std::vector<Vector> validate_partition(const Partition& p, const Vector& x);

/// Sum over blocks of (x_i - mu_i)^T Sigma_ii^{-1} (x_i - mu_i).
double block_quadform(const MvEllipticalParams& p, const Vector& x);
double block_quadform(const MvEllipticalParams& p, const BlockFactors& f,
                      const Vector& x);

/// Shapes (alpha_i or n_i / 2) and scales (sigma_i^2 or beta_i).
struct ScaleShapeParams {
  std::vector<double> shapes;
  std::vector<double> scales;

  void validate() const;
};

/// Rows are observations; columns are variables.
using SampleMatrix = Matrix;

/// Throws PreconditionError if any entry is NaN or infinite.
void check_finite(const SampleMatrix& m);

struct FitResult {
  std::map<std::string, double> params;
  double loglik = 0.0;
  /// Log-likelihood at the starting point of the first run.
  double initial_loglik = 0.0;
  /// Optimizer iterations summed over all runs.
  int iterations = 0;
  bool converged = false;
  std::string mode;
  int restarts = 0;
  std::string restart_policy;
};

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

}  // namespace multivec

#endif  // MULTIVEC_CORE_HPP_
