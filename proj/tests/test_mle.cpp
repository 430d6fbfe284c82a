// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "multivec/densities.hpp"
#include "multivec/errors.hpp"
#include "multivec/generators.hpp"
#include "multivec/mle.hpp"
#include "multivec/sampling.hpp"

namespace multivec {
namespace {

// Paired data from the dependent Kotz-gamma model: one joint draw of 2m
// coordinates, u_i first and v_i after.
SampleMatrix simulate_dependent(const KotzGammaDepParams& p, int m,
                                std::uint64_t seed) {
  ScaleShapeParams sp;
  sp.shapes.assign(m, p.alpha);
  sp.shapes.insert(sp.shapes.end(), m, p.beta);
  sp.scales.assign(m, p.sigma1 * p.sigma1);
  sp.scales.insert(sp.scales.end(), m, p.sigma2 * p.sigma2);
  Rng rng(seed);
  Vector x = sample_mv_gengamma(sp, GeneratorSpec::kotz(p.r, p.q, p.s), rng);
  SampleMatrix d(m, 2);
  for (int i = 0; i < m; ++i) {
    d(i, 0) = x(i);
    d(i, 1) = x(m + i);
  }
  return d;
}

std::vector<double> col(const SampleMatrix& d, int j) {
  std::vector<double> out(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) out[i] = d(i, j);
  return out;
}

// Density-sum oracle for the dependent likelihood.
double dependent_by_density(const KotzGammaDepParams& p,
                            const std::vector<double>& u,
                            const std::vector<double>& v) {
  const int m = static_cast<int>(u.size());
  ScaleShapeParams sp;
  sp.shapes.assign(m, p.alpha);
  sp.shapes.insert(sp.shapes.end(), m, p.beta);
  sp.scales.assign(m, p.sigma1 * p.sigma1);
  sp.scales.insert(sp.scales.end(), m, p.sigma2 * p.sigma2);
  Vector x(2 * m);
  for (int i = 0; i < m; ++i) {
    x(i) = u[i];
    x(m + i) = v[i];
  }
  return logpdf_mv_gengamma(sp, GeneratorSpec::kotz(p.r, p.q, p.s), x);
}

double independent_by_density(double sigma, double shape, double r, double q,
                              double s, const std::vector<double>& u) {
  ScaleShapeParams sp{{shape}, {sigma * sigma}};
  double total = 0.0;
  for (double x : u) {
    Vector one(1);
    one(0) = x;
    total += logpdf_mv_gengamma(sp, GeneratorSpec::kotz(r, q, s), one);
  }
  return total;
}

const std::vector<double> kU = {0.7, 1.9, 0.35, 2.6, 1.1, 0.05, 4.2};
const std::vector<double> kV = {2.1, 0.4, 3.3, 1.2, 0.9, 5.5, 0.6};

TEST(LoglikDependent, MatchesDensitySumOnGrid) {
  const std::vector<KotzGammaDepParams> grid = {
      {1.0, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0},
      {0.8, 1.7, 2.5, 0.6, 0.5, 1.0, 1.0},
      {1.3, 0.9, 1.5, 3.0, 0.4, 1.5, 1.1},
      {0.6, 2.2, 0.7, 1.2, 2.0, 0.3, 0.6},
      {2.0, 0.5, 4.0, 2.5, 0.05, 3.0, 1.8},
      {1.0, 1.0, 0.9, 0.8, 1.0, -2.0, 0.9},
  };
  for (const auto& p : grid) {
    double expect = dependent_by_density(p, kU, kV);
    double got = loglik_dependent(p, SuffStats::from_columns(kU, kV));
    EXPECT_NEAR(got, expect, 1e-8 * std::max(1.0, std::abs(expect)))
        << p.alpha << " " << p.beta << " " << p.q << " " << p.s;
  }
}

TEST(LoglikDependent, GaussianGeneratorMatchesDensitySum) {
  KotzGammaDepParams p{1.2, 0.7, 2.0, 1.5, 0.5, 1.0, 1.0};
  EXPECT_NEAR(loglik_dependent(p, SuffStats::from_columns(kU, kV)),
              dependent_by_density(p, kU, kV), 1e-8);
}

TEST(LoglikDependent, DependsOnlyOnSufficientStatistics) {
  std::vector<double> u = kU, v = kV;
  std::reverse(u.begin(), u.end());
  std::reverse(v.begin(), v.end());
  KotzGammaDepParams p{1.3, 0.9, 1.5, 3.0, 0.4, 1.5, 1.1};
  EXPECT_NEAR(loglik_dependent(p, SuffStats::from_columns(u, v)),
              loglik_dependent(p, SuffStats::from_columns(kU, kV)), 1e-10);
}

TEST(LoglikDependent, SigmaStationarityOfGaussianCase) {
  // With alpha, beta, sigma2 fixed and the normal generator, the maximizer
  // in sigma1 is sigma1^2 = c / (2 m alpha).
  SuffStats st = SuffStats::from_columns(kU, kV);
  const double alpha = 1.8;
  KotzGammaDepParams p{1.0, 1.0, alpha, 1.4, 0.5, 1.0, 1.0};
  auto f = [&](const std::vector<double>& x) {
    KotzGammaDepParams q = p;
    q.sigma1 = std::exp(x[0]);
    return -loglik_dependent(q, st);
  };
  NelderMeadOptions o;
  o.ftol = 1e-15;
  NelderMeadResult r = nelder_mead(f, {0.0}, o);
  double analytic = std::sqrt(st.c / (2.0 * st.m * alpha));
  EXPECT_NEAR(std::exp(r.x[0]), analytic, 1e-6);
}

TEST(LoglikDependent, RejectsBadParameters) {
  SuffStats st = SuffStats::from_columns(kU, kV);
  KotzGammaDepParams p;
  p.s = 0.0;
  EXPECT_THROW(loglik_dependent(p, st), ParameterOutOfDomain);
  p = {};
  p.sigma1 = -1.0;
  EXPECT_THROW(loglik_dependent(p, st), ParameterOutOfDomain);
  p = {};
  p.q = -1000.0;  // 2q + n = -2000 + 28 < 2
  EXPECT_THROW(loglik_dependent(p, st), ParameterOutOfDomain);
}

TEST(SuffStats, Errors) {
  std::vector<double> empty;
  EXPECT_THROW(SuffStats::from_columns(empty, empty), EmptySample);
  std::vector<double> bad = {1.0, 0.0};
  std::vector<double> ok = {1.0, 2.0};
  EXPECT_THROW(SuffStats::from_columns(bad, ok), NonPositiveInput);
  std::vector<double> short_col = {1.0};
  EXPECT_THROW(SuffStats::from_columns(short_col, ok), DimensionMismatch);
}

TEST(LoglikIndependent, MatchesDensitySumOnGrid) {
  struct P {
    double sigma, shape, r, q, s;
  };
  const std::vector<P> grid = {{1.0, 1.0, 0.5, 1.0, 1.0},
                               {0.7, 2.5, 0.3, 1.4, 0.8},
                               {1.6, 0.6, 1.7, 0.8, 1.5},
                               {2.2, 4.0, 0.05, -1.5, 0.5},
                               {0.4, 1.2, 3.0, 2.0, 2.5}};
  for (const P& p : grid) {
    double expect = independent_by_density(p.sigma, p.shape, p.r, p.q, p.s, kU);
    double got = loglik_independent(p.sigma, p.shape, p.r, p.q, p.s, kU);
    EXPECT_NEAR(got, expect, 1e-8 * std::max(1.0, std::abs(expect)));
  }
}

TEST(LoglikIndependent, GaussianGeneratorIsGammaLikelihood) {
  const double sigma = 1.3;
  const double alpha = 2.4;
  boost::math::gamma_distribution<double> g(alpha, 2.0 * sigma * sigma);
  double expect = 0.0;
  for (double x : kU) expect += std::log(boost::math::pdf(g, x));
  EXPECT_NEAR(loglik_independent(sigma, alpha, 0.5, 1.0, 1.0, kU), expect,
              1e-10 * std::max(1.0, std::abs(expect)));
}

TEST(LoglikIndependent, GaussianFactorization) {
  SuffStats st = SuffStats::from_columns(kU, kV);
  for (double s1 : {0.5, 1.0, 2.0}) {
    for (double a : {0.7, 1.0, 3.5}) {
      KotzGammaDepParams p{s1, 1.4, a, 2.2, 0.5, 1.0, 1.0};
      double dep = loglik_dependent(p, st);
      double ind = loglik_independent(s1, a, 0.5, 1.0, 1.0, kU) +
                   loglik_independent(1.4, 2.2, 0.5, 1.0, 1.0, kV);
      EXPECT_NEAR(dep, ind, 1e-8 * std::max(1.0, std::abs(dep)));
    }
  }
}

TEST(LoglikIndependent, EmptySample) {
  std::vector<double> empty;
  EXPECT_THROW(loglik_independent(1, 1, 0.5, 1, 1, empty), EmptySample);
}

TEST(GammaInit, FrozenValuesForOneToFour) {
  // Independently evaluated at 40 digits.
  std::vector<double> u = {1, 2, 3, 4};
  GammaInit g = gamma_init(u);
  EXPECT_NEAR(g.t, 0.12177727428716866, 1e-12);
  EXPECT_NEAR(g.alpha, 4.260429365453258, 1e-10);
  EXPECT_NEAR(g.sigma, 0.5416619411526721, 1e-10);
}

TEST(GammaInit, ConstantSampleIsDegenerate) {
  std::vector<double> u = {5, 5, 5};
  EXPECT_THROW(gamma_init(u), DegenerateSample);
}

TEST(GammaInit, Errors) {
  std::vector<double> empty;
  EXPECT_THROW(gamma_init(empty), EmptySample);
  std::vector<double> one = {2.0};
  EXPECT_THROW(gamma_init(one), PreconditionError);
  std::vector<double> neg = {1.0, -2.0};
  EXPECT_THROW(gamma_init(neg), NonPositiveInput);
}

TEST(GammaInit, ScaleEquivariance) {
  std::vector<double> scaled;
  const double c = 7.3;
  for (double x : kU) scaled.push_back(c * x);
  GammaInit a = gamma_init(kU);
  GammaInit b = gamma_init(scaled);
  EXPECT_NEAR(b.alpha, a.alpha, 1e-12 * a.alpha);
  EXPECT_NEAR(b.sigma, std::sqrt(c) * a.sigma, 1e-12 * b.sigma);
}

TEST(GammaInit, ConsistentOnLargeGammaSample) {
  Rng rng(11);
  std::vector<double> u(100000);
  for (double& x : u) x = 2.0 * rng.gamma(3.0);  // Gamma(3, scale 2)
  GammaInit g = gamma_init(u);
  EXPECT_NEAR(g.alpha, 3.0, 0.1);
  EXPECT_NEAR(g.sigma, 1.0, 0.05);
}

TEST(NelderMead, Quadratic) {
  auto f = [](const std::vector<double>& x) {
    return (x[0] - 3.0) * (x[0] - 3.0);
  };
  NelderMeadResult r = nelder_mead(f, {0.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 3.0, 1e-6);
}

TEST(NelderMead, Rosenbrock) {
  auto f = [](const std::vector<double>& x) {
    double a = 1.0 - x[0];
    double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions o;
  o.ftol = 1e-14;
  NelderMeadResult r = nelder_mead(f, {-1.2, 1.0}, o);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(NelderMead, NonFiniteStartIsPreconditionError) {
  auto f = [](const std::vector<double>&) {
    return -std::numeric_limits<double>::infinity();
  };
  EXPECT_THROW(nelder_mead(f, {0.0}), PreconditionError);
}

TEST(NelderMead, NonFiniteValuesDuringSearchAreAvoided) {
  // Minimum at 0.5 inside a region where f is NaN for x < 0.
  auto f = [](const std::vector<double>& x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (x[0] - 0.5) * (x[0] - 0.5);
  };
  NelderMeadResult r = nelder_mead(f, {2.0});
  EXPECT_NEAR(r.x[0], 0.5, 1e-5);
}

TEST(NelderMead, IterationCapIsReported) {
  auto f = [](const std::vector<double>& x) {
    double a = 1.0 - x[0];
    double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  NelderMeadOptions o;
  o.max_iters = 5;
  NelderMeadResult r = nelder_mead(f, {-1.2, 1.0}, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 5);
}

TEST(NelderMead, Deterministic) {
  auto f = [](const std::vector<double>& x) {
    return std::cos(3 * x[0]) + x[0] * x[0] + std::sin(x[1]) + x[1] * x[1];
  };
  NelderMeadResult a = nelder_mead(f, {1.0, -1.0});
  NelderMeadResult b = nelder_mead(f, {1.0, -1.0});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.f, b.f);
}

// Gamma MLE by Newton on log(alpha) - digamma(alpha) = t.
std::pair<double, double> gamma_mle(const std::vector<double>& u) {
  GammaInit g = gamma_init(u);
  double a = g.alpha;
  for (int i = 0; i < 100; ++i) {
    double f = std::log(a) - boost::math::digamma(a) - g.t;
    double df = 1.0 / a - boost::math::trigamma(a);
    a -= f / df;
  }
  double mean = 0.0;
  for (double x : u) mean += x;
  mean /= static_cast<double>(u.size());
  return {std::sqrt(mean / (2.0 * a)), a};
}

SampleMatrix gamma_pairs(int m, double a, double b, double s1, double s2,
                         std::uint64_t seed) {
  Rng rng(seed);
  SampleMatrix d(m, 2);
  for (int i = 0; i < m; ++i) {
    d(i, 0) = 2.0 * s1 * s1 * rng.gamma(a);
    d(i, 1) = 2.0 * s2 * s2 * rng.gamma(b);
  }
  return d;
}

TEST(FitIndependent, FrozenGeneratorIsGammaMle) {
  SampleMatrix d = gamma_pairs(500, 2.5, 0.8, 1.0, 1.7, 4);
  FitOptions o;
  o.freeze_generator = true;
  FitResult r = fit_independent(d, o);
  auto [su, au] = gamma_mle(col(d, 0));
  auto [sv, av] = gamma_mle(col(d, 1));
  EXPECT_NEAR(r.params["sigma1"], su, 1e-4 * su);
  EXPECT_NEAR(r.params["alpha"], au, 1e-4 * au);
  EXPECT_NEAR(r.params["sigma2"], sv, 1e-4 * sv);
  EXPECT_NEAR(r.params["beta"], av, 1e-4 * av);
  EXPECT_EQ(r.params["q1"], 1.0);
}

TEST(FitDependent, FrozenGeneratorMatchesIndependentGammaFits) {
  SampleMatrix d = gamma_pairs(500, 2.5, 0.8, 1.0, 1.7, 4);
  FitOptions o;
  o.freeze_generator = true;
  FitResult dep = fit_dependent(d, o);
  FitResult ind = fit_independent(d, o);
  for (const char* k : {"sigma1", "alpha", "sigma2", "beta"}) {
    EXPECT_NEAR(dep.params[k], ind.params[k], 1e-4 * ind.params[k]) << k;
  }
  EXPECT_NEAR(dep.loglik, ind.loglik, 1e-6 * std::abs(ind.loglik));
}

TEST(FitDependent, RecoversShapesOnSimulatedData) {
  const KotzGammaDepParams truth{1.0, 2.0, 5.0, 8.0, 0.4, 1.5, 1.1};
  const int m = 2000;
  SampleMatrix d = simulate_dependent(truth, m, 8);
  auto t0 = std::chrono::steady_clock::now();
  FitResult r = fit_dependent(d);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  double at_truth =
      loglik_dependent(truth, SuffStats::from_columns(col(d, 0), col(d, 1)));
  EXPECT_NEAR(r.params["alpha"], 5.0, 0.5);
  EXPECT_NEAR(r.params["beta"], 8.0, 0.8);
  EXPECT_GE(r.loglik, at_truth - 1.0);
  EXPECT_GE(r.loglik, r.initial_loglik);
  EXPECT_EQ(r.restarts, 2);
  EXPECT_LT(secs, 60.0);
}

TEST(FitDependent, PermutationInvariantAndDeterministic) {
  const KotzGammaDepParams truth{1.0, 2.0, 2.0, 3.0, 0.5, 1.2, 0.9};
  SampleMatrix d = simulate_dependent(truth, 200, 3);
  SampleMatrix rev = d.colwise().reverse();
  FitResult a = fit_dependent(d);
  FitResult b = fit_dependent(d);
  FitResult c = fit_dependent(rev);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.loglik, b.loglik);
  for (const auto& [k, v] : a.params) {
    EXPECT_NEAR(c.params[k], v, 1e-6 * std::abs(v)) << k;
  }
}

TEST(FitDependent, ScalingDataScalesSigmasOnly) {
  // Checked on the Gaussian-generator fit, whose maximizer is unique. The
  // full seven-parameter surface has no interior maximizer (it keeps rising
  // as s or q grow), so its end point moves with rounding.
  SampleMatrix d = gamma_pairs(300, 2.0, 3.0, 1.0, 1.5, 5);
  const double c = 7.0;
  FitOptions o;
  o.freeze_generator = true;
  FitResult a = fit_dependent(d, o);
  FitResult b = fit_dependent(c * d, o);
  const double rc = std::sqrt(c);
  EXPECT_NEAR(b.params["sigma1"], rc * a.params["sigma1"],
              1e-4 * b.params["sigma1"]);
  EXPECT_NEAR(b.params["sigma2"], rc * a.params["sigma2"],
              1e-4 * b.params["sigma2"]);
  for (const char* k : {"alpha", "beta", "r", "q", "s"}) {
    EXPECT_NEAR(b.params[k], a.params[k], 1e-4 * std::abs(a.params[k])) << k;
  }
}

TEST(FitDependent, ScalingDataShiftsLoglikByConstant) {
  // loglik(c data; sqrt(c) sigma) = loglik(data; sigma) - 2 m log c.
  const KotzGammaDepParams p{1.0, 2.0, 5.0, 8.0, 0.4, 1.5, 1.1};
  SampleMatrix d = simulate_dependent(p, 50, 2);
  const double c = 3.0;
  KotzGammaDepParams ps = p;
  ps.sigma1 *= std::sqrt(c);
  ps.sigma2 *= std::sqrt(c);
  SampleMatrix dc = c * d;
  double a = loglik_dependent(p, SuffStats::from_columns(col(d, 0), col(d, 1)));
  double b =
      loglik_dependent(ps, SuffStats::from_columns(col(dc, 0), col(dc, 1)));
  EXPECT_NEAR(b, a - 2.0 * 50 * std::log(c), 1e-8 * std::abs(a));
}

TEST(FitDependent, Errors) {
  SampleMatrix two(2, 2);
  two << 1, 2, 3, 4;
  EXPECT_THROW(fit_dependent(two), PreconditionError);
  SampleMatrix neg(3, 2);
  neg << 1, 2, 3, -4, 5, 6;
  EXPECT_THROW(fit_dependent(neg), NonPositiveInput);
  SampleMatrix constant(3, 2);
  constant << 1, 2, 1, 3, 1, 4;
  EXPECT_THROW(fit_dependent(constant), DegenerateSample);
  SampleMatrix three_cols(3, 3);
  three_cols.setOnes();
  EXPECT_THROW(fit_dependent(three_cols), DimensionMismatch);
}

TEST(FitIndependent, GammaDataGivesNearGaussianGenerator) {
  // Only s, q + shape and r sigma^(-2s) are identified per variable, so q is
  // checked through q + shape. The spread of s-hat is about 0.1 at m = 2000
  // and 0.03 at m = 20000.
  SampleMatrix d = gamma_pairs(20000, 3.0, 2.0, 1.0, 1.5, 3);
  FitResult r = fit_independent(d);
  EXPECT_NEAR(r.params["s1"], 1.0, 0.05);
  EXPECT_NEAR(r.params["s2"], 1.0, 0.05);
  EXPECT_NEAR(r.params["q1"] + r.params["alpha"], 4.0, 0.2);
  EXPECT_NEAR(r.params["q2"] + r.params["beta"], 3.0, 0.2);
  EXPECT_GE(r.loglik, r.initial_loglik);
}

TEST(FitIndependent, BelowDependentOnDependentData) {
  const KotzGammaDepParams truth{1.0, 2.0, 5.0, 8.0, 0.4, 1.5, 1.1};
  SampleMatrix d = simulate_dependent(truth, 2000, 8);
  FitResult dep = fit_dependent(d);
  FitResult ind = fit_independent(d);
  EXPECT_LE(ind.loglik, dep.loglik);
}

}  // namespace
}  // namespace multivec
