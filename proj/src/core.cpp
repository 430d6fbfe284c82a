// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/core.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace multivec {

int Partition::total() const {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

void Partition::validate() const {
  if (dims.empty()) throw ParameterOutOfDomain("partition needs k >= 1");
  for (int d : dims) {
    if (d < 1) throw ParameterOutOfDomain("block dimension must be >= 1");
  }
  if (n0 && *n0 < 1) throw ParameterOutOfDomain("n0 must be >= 1");
}

double ExtendedShape::alpha_star() const {
  double s = alpha0;
  for (double a : alphas) s += a;
  return s;
}

void ExtendedShape::validate() const {
  if (alphas.empty()) throw ParameterOutOfDomain("need at least one shape");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw ParameterOutOfDomain("alpha0 must be positive");
  }
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw ParameterOutOfDomain("shape parameters must be positive");
    }
  }
}

SpdFactor::SpdFactor(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DimensionMismatch("matrix must be square and non-empty");
  }
  double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("matrix is not symmetric");
  }
  llt_.compute(s);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("matrix is not positive definite");
  }
  const auto& l = llt_.matrixLLT();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    double d = l(i, i);
    if (!(d > 0.0)) throw NotPositiveDefinite("non-positive Cholesky pivot");
    ld += std::log(d);
  }
  logdet_ = 2.0 * ld;
}

double SpdFactor::quadform(const Eigen::Ref<const Vector>& x) const {
  Vector z = llt_.matrixL().solve(x);
  return z.squaredNorm();
}

SpdFactor spd_factorize(const Matrix& s) { return SpdFactor(s); }

void MvEllipticalParams::validate() const {
  partition.validate();
  int k = partition.k();
  if (static_cast<int>(mus.size()) != k ||
      static_cast<int>(sigmas.size()) != k) {
    throw DimensionMismatch("need one location and one scale per block");
  }
  for (int i = 0; i < k; ++i) {
    int d = partition.dims[i];
    if (mus[i].size() != d) {
      throw DimensionMismatch("location " + std::to_string(i) +
                              " has wrong length");
    }
    if (sigmas[i].rows() != d || sigmas[i].cols() != d) {
      throw DimensionMismatch("scale " + std::to_string(i) +
                              " has wrong shape");
    }
  }
}

BlockFactors factorize_blocks(const MvEllipticalParams& p) {
  p.validate();
  BlockFactors f;
  f.factors.reserve(p.sigmas.size());
  for (const auto& s : p.sigmas) {
    f.factors.emplace_back(s);
    f.logdet_sum += f.factors.back().logdet();
  }
  return f;
}

std::vector<Vector> validate_partition(const Partition& p, const Vector& x) {
  p.validate();
  if (x.size() != p.total()) {
    throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                            " does not match partition total " +
                            std::to_string(p.total()));
  }
  std::vector<Vector> blocks;
  blocks.reserve(p.dims.size());
  Eigen::Index off = 0;
  for (int d : p.dims) {
    blocks.emplace_back(x.segment(off, d));
    off += d;
  }
  return blocks;
}

double block_quadform(const MvEllipticalParams& p, const BlockFactors& f,
                      const Vector& x) {
  if (x.size() != p.partition.total()) {
    throw DimensionMismatch("vector length does not match partition");
  }
  double q = 0.0;
  Eigen::Index off = 0;
  for (int i = 0; i < p.partition.k(); ++i) {
    int d = p.partition.dims[i];
    q += f.factors[i].quadform(x.segment(off, d) - p.mus[i]);
    off += d;
  }
  return q;
}

double block_quadform(const MvEllipticalParams& p, const Vector& x) {
  return block_quadform(p, factorize_blocks(p), x);
}

void ScaleShapeParams::validate() const {
  if (shapes.empty() || shapes.size() != scales.size()) {
    throw DimensionMismatch("shapes and scales must be non-empty and equal");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (!(shapes[i] > 0.0) || !std::isfinite(shapes[i]) ||
        !(scales[i] > 0.0) || !std::isfinite(scales[i])) {
      throw ParameterOutOfDomain("shapes and scales must be positive");
    }
  }
}

void check_finite(const SampleMatrix& m) {
  if (!m.allFinite()) throw PreconditionError("sample has NaN or Inf");
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace multivec
