// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/LU>
#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "json.hpp"
#include "multivec/densities.hpp"
#include "multivec/errors.hpp"
#include "multivec/generators.hpp"
#include "multivec/validation.hpp"

namespace multivec {
namespace {

std::vector<Vector> scalars(const Vector& x) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(x.segment(i, 1));
  return out;
}

TEST(Kolmogorov, ReferenceValues) {
  // Reference values from an independent implementation.
  EXPECT_NEAR(kolmogorov_sf(0.3), 0.9999906941986655, 1e-13);
  EXPECT_NEAR(kolmogorov_sf(0.5), 0.9639452436648751, 1e-13);
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.26999967167735456, 1e-13);
  EXPECT_NEAR(kolmogorov_sf(1.18), 0.1234538094297657, 1e-13);
  EXPECT_NEAR(kolmogorov_sf(1.5), 0.022217962616525127, 1e-13);
  EXPECT_NEAR(kolmogorov_sf(2.5), 7.453306344157342e-06, 1e-16);
  EXPECT_EQ(kolmogorov_sf(0.0), 1.0);
  EXPECT_NEAR(kolmogorov_quantile_upper(0.05), 1.3580986393225507, 1e-9);
  EXPECT_NEAR(kolmogorov_quantile_upper(0.01), 1.6276236115189504, 1e-9);
}

TEST(Chi2, SurvivalFunction) {
  EXPECT_NEAR(chi2_sf(10.0, 4.0), 0.04042768199451279, 1e-12);
  EXPECT_NEAR(chi2_sf(3.0, 1.0), 0.08326451666355042, 1e-12);
}

TEST(Chi2, PoolsSmallCells) {
  std::vector<double> obs = {1, 2, 50, 47};
  std::vector<double> exp = {1.5, 1.5, 48.5, 48.5};
  Chi2Result r = chi2_gof(obs, exp);
  // The two small cells merge into one cell expecting 3, then into the next.
  EXPECT_EQ(r.dof, 1.0);
  EXPECT_GT(r.p_value, 0.5);
}

TEST(Ks, UniformSampleAgainstUniformCdf) {
  Rng rng(1);
  std::vector<double> xs(5000);
  for (double& x : xs) x = rng.uniform();
  KsResult r = ks_one_sample(xs, [](double x) {
    return std::clamp(x, 0.0, 1.0);
  });
  EXPECT_GT(r.p_value, 0.01);
  KsResult shifted = ks_one_sample(xs, [](double x) {
    return std::clamp(x - 0.05, 0.0, 1.0);
  });
  EXPECT_LT(shifted.p_value, 1e-6);
}

TEST(Ks, TwoSampleSameLaw) {
  Rng rng(2);
  std::vector<double> a(4000), b(3000);
  for (double& x : a) x = rng.normal();
  for (double& x : b) x = rng.normal();
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  for (double& x : b) x += 0.2;
  EXPECT_LT(ks_two_sample(a, b).p_value, 1e-6);
}

TEST(CheckReport, PassedIffResidualWithinTolerance) {
  EXPECT_TRUE(make_report("a", 1e-9, 1e-8).passed);
  EXPECT_TRUE(make_report("a", 1e-8, 1e-8).passed);
  EXPECT_FALSE(make_report("a", 2e-8, 1e-8).passed);
  EXPECT_FALSE(make_report("a", std::nan(""), 1.0).passed);
}

TEST(CheckReport, JsonLine) {
  CheckReport r = make_report("normalization/x", 0.1, 1e-4, "n=2");
  std::string line = to_json_line(r);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(line,
            R"({"details":"n=2","name":"normalization/x","passed":false,)"
            R"("residual":0.10000000000000001,"tolerance":0.0001})");
  auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["residual"].get<double>(), 0.1);
}

TEST(QuadNormalization, GaussianTwoDimensional) {
  MvEllipticalParams p;
  p.partition.dims = {2};
  p.mus = {Vector::Zero(2)};
  Matrix s(2, 2);
  s << 1.0, 0.3, 0.3, 0.5;
  p.sigmas = {s};
  auto spec = GeneratorSpec::gaussian();
  CheckReport r = quad_normalization(
      "gauss", [&](const Vector& x) { return logpdf_mv_elliptical(p, spec, x); },
      {real_line(0.0, 1.0), real_line(0.0, 0.7)}, 1e-8, 1e-12);
  EXPECT_TRUE(r.passed) << r.residual;
}

TEST(QuadNormalization, Beta1) {
  BetaParams p;
  p.shape.alphas = {1.0, 2.0};
  p.shape.alpha0 = 1.5;
  p.betas = {1.0, 3.0};
  CheckReport r = quad_normalization(
      "beta1", [&](const Vector& b) { return logpdf_mv_beta1(p, b); },
      {finite_range(0.0, 1.0), finite_range(0.0, 1.0)}, 1e-5);
  EXPECT_TRUE(r.passed) << r.residual;
}

TEST(QuadNormalization, GenGammaKotz) {
  ScaleShapeParams p{{2.0}, {1.0}};
  auto spec = GeneratorSpec::kotz(1.0, 2.0, 1.5);
  CheckReport r = quad_normalization(
      "gengamma",
      [&](const Vector& u) { return logpdf_mv_gengamma(p, spec, u); },
      {half_line(0.0, 2.0)}, 1e-6, 1e-12);
  EXPECT_TRUE(r.passed) << r.residual;
}

TEST(QuadNormalization, DetectsMisScaledDensity) {
  ScaleShapeParams p{{2.0}, {1.0}};
  auto spec = GeneratorSpec::kotz(1.0, 2.0, 1.5);
  CheckReport r = quad_normalization(
      "gengamma x2",
      [&](const Vector& u) {
        return logpdf_mv_gengamma(p, spec, u) + std::log(2.0);
      },
      {half_line(0.0, 2.0)}, 1e-6);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.residual, 1.0, 1e-6);
}

Proposal gaussian_proposal(double sd) {
  return {[sd](Rng& rng) {
            Vector x(2);
            x << sd * rng.normal(), sd * rng.normal();
            return x;
          },
          [sd](const Vector& x) {
            return -std::log(2.0 * std::numbers::pi * sd * sd) -
                   0.5 * x.squaredNorm() / (sd * sd);
          }};
}

MvTParams t_params() {
  MvTParams tp;
  tp.dims = {1, 1};
  tp.alpha0 = 1.5;
  tp.betas = {1.0, 0.5};
  return tp;
}

TEST(McNormalization, MultivariateTPasses) {
  MvTParams tp = t_params();
  CheckReport r = mc_normalization(
      "mv-t", [&](const Vector& t) { return logpdf_mv_t(tp, scalars(t)); },
      gaussian_proposal(3.0), 1000000, 7);
  EXPECT_TRUE(r.passed) << r.details;
}

TEST(McNormalization, MisScaledDensityFails) {
  MvTParams tp = t_params();
  CheckReport r = mc_normalization(
      "mv-t x2",
      [&](const Vector& t) {
        return logpdf_mv_t(tp, scalars(t)) + std::log(2.0);
      },
      gaussian_proposal(3.0), 100000, 7);
  EXPECT_FALSE(r.passed) << r.details;
}

TEST(McNormalization, SameSeedSameReport) {
  MvTParams tp = t_params();
  auto f = [&](const Vector& t) { return logpdf_mv_t(tp, scalars(t)); };
  CheckReport a = mc_normalization("t", f, gaussian_proposal(3.0), 20000, 3);
  CheckReport b = mc_normalization("t", f, gaussian_proposal(3.0), 20000, 3);
  EXPECT_EQ(to_json_line(a), to_json_line(b));
}

TEST(McNormalization, DegenerateWeights) {
  // A target far narrower than the proposal puts almost all weight on a
  // handful of draws.
  const double sd = 1e-3;
  auto narrow = [sd](const Vector& x) {
    return -std::log(2.0 * std::numbers::pi * sd * sd) -
           0.5 * x.squaredNorm() / (sd * sd);
  };
  EXPECT_THROW(mc_normalization("narrow", narrow, gaussian_proposal(10.0),
                                10000, 1),
               DegenerateWeights);
}

TEST(Jacobian, OneDimensionalClosedForm) {
  // x uniform on (-1, 1), y = x / sqrt(1 - x^2): f(y) = (1 + y^2)^(-3/2) / 2.
  double worst = 0.0;
  for (double y = -20.0; y <= 20.0; y += 0.05) {
    Vector v(1);
    v(0) = y;
    double expect = 0.5 * std::pow(1.0 + y * y, -1.5);
    worst = std::max(worst,
                     std::abs(std::exp(jacobian_log_density(1, v)) - expect));
  }
  EXPECT_LT(worst, 1e-3);
  EXPECT_LT(worst, 1e-15);
}

TEST(Jacobian, MatchesFiniteDifferenceDeterminant) {
  // f_Y(y) = |det d(space_to_ball)/dy| / vol(ball), checked in n = 2, 3.
  for (int n : {2, 3}) {
    double log_vol = 0.5 * n * std::log(std::numbers::pi) -
                     std::lgamma(0.5 * n + 1.0);
    Rng rng(static_cast<std::uint64_t>(n));
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Vector y(n);
      for (int i = 0; i < n; ++i) y(i) = 2.0 * rng.normal();
      Matrix jac(n, n);
      const double h = 1e-6;
      for (int j = 0; j < n; ++j) {
        Vector yp = y, ym = y;
        yp(j) += h;
        ym(j) -= h;
        jac.col(j) = (space_to_ball(yp) - space_to_ball(ym)) / (2.0 * h);
      }
      double fd = std::abs(jac.determinant()) * std::exp(-log_vol);
      double an = std::exp(jacobian_log_density(n, y));
      worst = std::max(worst, std::abs(fd - an));
    }
    EXPECT_LT(worst, 1e-3) << n;
  }
}

TEST(Jacobian, RoundTrip) {
  Rng rng(5);
  for (int n : {1, 2, 3, 5}) {
    for (int i = 0; i < 100; ++i) {
      Vector x = std::pow(rng.uniform(), 1.0 / n) * sample_unit_sphere(n, rng);
      Vector back = space_to_ball(ball_to_space(x));
      EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
  Vector out(2);
  out << 0.8, 0.7;
  EXPECT_THROW(ball_to_space(out), PreconditionError);
}

TEST(Jacobian, ChiSquareCheck) {
  EXPECT_TRUE(jacobian_check(1, 100000, 1).passed);
  EXPECT_TRUE(jacobian_check(2, 100000, 1).passed);
  EXPECT_FALSE(jacobian_check(2, 100000, 1, std::log(2.0)).passed);
  EXPECT_THROW(jacobian_check(0, 10, 1), PreconditionError);
}

TEST(Pushforward, SmokeModeIsFast) {
  for (const FamilyCase& c : standard_cases()) {
    auto t0 = std::chrono::steady_clock::now();
    PushforwardTables t = build_pushforward_tables(c, 4, 24, 1e-6);
    CheckReport r = pushforward_check(c, t, 1000, kDefaultCheckSeed);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    EXPECT_LT(secs, 1.0) << c.name;
    EXPECT_TRUE(std::isfinite(r.residual)) << c.name;
  }
}

TEST(Pushforward, DeterministicGivenSeed) {
  FamilyCase c = standard_cases().front();
  PushforwardTables t = build_pushforward_tables(c, 4, 24, 1e-6);
  EXPECT_EQ(to_json_line(pushforward_check(c, t, 5000, 9)),
            to_json_line(pushforward_check(c, t, 5000, 9)));
}

TEST(Pushforward, UncorrectedBeta1ExponentIsRejected) {
  FamilyCase good;
  for (const FamilyCase& c : standard_cases()) {
    if (c.name == "mv-beta1") good = c;
  }
  ASSERT_FALSE(good.name.empty());
  FamilyCase bad = uncorrected_beta1_case();
  PushforwardTables tg = build_pushforward_tables(good, 8, 48, 1e-7);
  PushforwardTables tb = build_pushforward_tables(bad, 8, 48, 1e-7);
  EXPECT_TRUE(pushforward_check(good, tg, 100000, kDefaultCheckSeed).passed);
  EXPECT_FALSE(pushforward_check(bad, tb, 100000, kDefaultCheckSeed).passed);
}

TEST(MarginalCdf, MatchesNormalMargin) {
  MvEllipticalParams p;
  p.partition.dims = {1, 1};
  p.mus = {Vector::Constant(1, 0.5), Vector::Constant(1, -1.0)};
  p.sigmas = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5)};
  auto spec = GeneratorSpec::gaussian();
  MarginalCdf m([&](const Vector& x) { return logpdf_mv_elliptical(p, spec, x); },
                {real_line(0.5, 1.4), real_line(-1.0, 0.7)}, 0);
  boost::math::normal_distribution<double> n(0.5, std::sqrt(2.0));
  for (double x : {-3.0, -1.0, 0.0, 0.5, 1.7, 4.0}) {
    EXPECT_NEAR(m(x), boost::math::cdf(n, x), 2e-6) << x;
  }
  EXPECT_NEAR(m.quantile(0.5), 0.5, 1e-6);
  EXPECT_NEAR(m.total(), 1.0, 1e-8);
}

}  // namespace
}  // namespace multivec
