// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_MLE_HPP_
#define MULTIVEC_MLE_HPP_

#include <functional>
#include <span>
#include <vector>

#include "multivec/core.hpp"

namespace multivec {

/// Kotz-gamma model for paired positive data (u_i, v_i): the u_i share
/// shape alpha and scale sigma1^2, the v_i shape beta and scale sigma2^2,
/// and all 2m coordinates share one Kotz(r, q, s) generator.
struct KotzGammaDepParams {
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double r = 0.5;
  double q = 1.0;
  double s = 1.0;

  /// Positivity and 2q + n > 2 with n = 2m(alpha + beta).
  void validate(int m) const;
};

/// Sums the likelihoods need, accumulated with compensated summation.
struct SuffStats {
  int m = 0;
  double a = 0.0;  // sum log u
  double b = 0.0;  // sum log v
  double c = 0.0;  // sum u
  double d = 0.0;  // sum v

  /// Throws EmptySample for m = 0, NonPositiveInput for entries <= 0 and
  /// DimensionMismatch when the columns differ in length.
  static SuffStats from_columns(std::span<const double> u,
                                std::span<const double> v);
};

/// sum u_i^s, compensated.
double sum_pow(std::span<const double> u, double s);

/// Dependent Kotz-gamma log-likelihood:
///   log s + (q + M - 1) log(r) / s + lgamma(M) - lgamma((q + M - 1) / s)
///   + (alpha - 1) a + (beta - 1) b
///   - m (2 alpha log sigma1 + 2 beta log sigma2 + lgamma(alpha) + lgamma(beta))
///   + (q - 1) log w - r w^s
/// with M = m (alpha + beta) and w = c / sigma1^2 + d / sigma2^2.
double loglik_dependent(const KotzGammaDepParams& p, const SuffStats& st);

/// Log-likelihood of u_1..u_m as independent one-block Kotz-gamma draws:
///   m log s + m (q + shape - 1) log(r) / s - m lgamma((q + shape - 1) / s)
///   - 2m (q + shape - 1) log sigma + (q + shape - 2) sum log u
///   - r sigma^(-2s) sum u^s
double loglik_independent(double sigma, double shape, double r, double q,
                          double s, std::span<const double> u);

/// Closed-form starting point for the gamma shape/scale MLE.
struct GammaInit {
  double alpha = 0.0;
  double sigma = 0.0;
  double t = 0.0;  // log(mean u) - mean(log u)
};

/// alpha = (3 - t + sqrt((t - 3)^2 + 24 t)) / (12 t),
/// sigma = sqrt(sum u / (2 m alpha)). Throws DegenerateSample when t <= 1e-12
/// and PreconditionError when m < 2.
GammaInit gamma_init(std::span<const double> u);

struct NelderMeadOptions {
  int max_iters = 10000;
  /// Stop when the simplex function spread is below ftol * max(1, |f_best|).
  double ftol = 1e-10;
  /// Initial simplex edge along each coordinate.
  double step = 0.1;
  /// After convergence, rebuild the simplex at the best point up to this
  /// many times while that still lowers f by more than the tolerance.
  int polish = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes f with the Nelder-Mead simplex (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite values met during the search
/// count as +inf. Throws PreconditionError if f(x0) is not finite.
NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts = {});

struct FitOptions {
  NelderMeadOptions optimizer;
  /// Number of optimizer runs. Run 0 starts at the Gaussian anchor, run 1
  /// with q and s scaled by 1.2, run 2 by 0.8, later runs alternate with
  /// growing offsets. The best log-likelihood is kept.
  int restarts = 3;
  /// Hold (r, q, s) at the Gaussian generator (1/2, 1, 1).
  bool freeze_generator = false;
};

/// Maximizes loglik_dependent over the logs of all seven parameters from
/// (gamma_init(u), gamma_init(v), r = 1/2, q = 1, s = 1). Column 0 is u,
/// column 1 is v. Keys: sigma1, alpha, sigma2, beta, r, q, s.
FitResult fit_dependent(const SampleMatrix& data, const FitOptions& opts = {});

/// Two separate five-parameter fits of loglik_independent with the same
/// starts. Keys: sigma1, alpha, r1, q1, s1, sigma2, beta, r2, q2, s2. loglik
/// is the sum of both maxima.
FitResult fit_independent(const SampleMatrix& data,
                          const FitOptions& opts = {});

}  // namespace multivec

#endif  // MULTIVEC_MLE_HPP_
