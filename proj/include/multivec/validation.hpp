// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_VALIDATION_HPP_
#define MULTIVEC_VALIDATION_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "multivec/core.hpp"
#include "multivec/quadrature.hpp"
#include "multivec/sampling.hpp"

namespace multivec {

/// Outcome of one check. passed is always residual <= tolerance.
struct CheckReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string details;
};

CheckReport make_report(std::string name, double residual, double tolerance,
                        std::string details = {});

/// One JSON object on a single line, keys sorted, numbers with 17
/// significant digits.
std::string to_json_line(const CheckReport& r);

//---------------------------------------------------------------------------
// Goodness of fit
//---------------------------------------------------------------------------

/// P(K > x) for the limiting Kolmogorov distribution.
double kolmogorov_sf(double x);
/// Smallest x with kolmogorov_sf(x) <= alpha.
double kolmogorov_quantile_upper(double alpha);

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double p_value = 0.0;
  std::size_t n = 0;
};

/// One-sample KS test. The p-value uses the limiting law with Stephens'
/// finite-sample factor sqrt(n) + 0.12 + 0.11 / sqrt(n).
KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 0.0;
};

/// Pearson chi-square against expected counts. Adjacent cells are pooled
/// until each pooled cell expects at least min_expected counts.
Chi2Result chi2_gof(const std::vector<double>& observed,
                    const std::vector<double>& expected,
                    double min_expected = 5.0);

double chi2_sf(double x, double dof);

//---------------------------------------------------------------------------
// Densities under test
//---------------------------------------------------------------------------

using LogDensity = std::function<double(const Vector&)>;
using Sampler = std::function<Vector(Rng&)>;

/// A density with a matching constructive sampler and its support.
struct FamilyCase {
  std::string name;
  LogDensity logpdf;
  Sampler sample;
  std::vector<Range> support;
  /// Scalar families (coordinates are scalars with real shapes) are held
  /// to a tighter normalization tolerance than joint vector families.
  bool scalar = false;
};

/// Every density family at total dimension two.
std::vector<FamilyCase> standard_cases();

/// mv_beta1 with the (1 - b_i) exponent missing the alpha_0 term, paired
/// with the correct sampler. Used to show that the check discriminates.
FamilyCase uncorrected_beta1_case();

//---------------------------------------------------------------------------
// Checks
//---------------------------------------------------------------------------

/// |integral of exp(logpdf) over the support - 1| by nested quadrature.
CheckReport quad_normalization(const std::string& name,
                               const LogDensity& logpdf,
                               const std::vector<Range>& support,
                               double tolerance, double quad_tol = 1e-9);

struct Proposal {
  Sampler sample;
  LogDensity logpdf;
};

/// Importance-sampling estimate of the integral; passes when
/// |I - 1| <= 3 SE. Throws DegenerateWeights when ESS < N / 100.
CheckReport mc_normalization(const std::string& name, const LogDensity& logpdf,
                             const Proposal& proposal, std::int64_t n,
                             std::uint64_t seed);

/// Pushforward density of y = x / sqrt(1 - |x|^2) for x uniform on the unit
/// ball in R^n, obtained from the Jacobian (dy) = (1 - |x|^2)^(-(n/2+1))(dx).
double jacobian_log_density(int n, const Vector& y);
Vector ball_to_space(const Vector& x);
Vector space_to_ball(const Vector& y);

/// Uniform-in-ball draws pushed through ball_to_space, binned by |y| and
/// the sign of y_1, against cell probabilities from jacobian_log_density
/// (chi-square, p > 0.001). log_scale multiplies the reference density by
/// exp(log_scale); it is nonzero only when calibrating the check itself.
CheckReport jacobian_check(int n, std::int64_t draws, std::uint64_t seed,
                           double log_scale = 0.0);

/// CDF of one coordinate of a two-dimensional density, tabulated by
/// quadrature on a grid with cubic Hermite interpolation.
class MarginalCdf {
 public:
  MarginalCdf(const LogDensity& logpdf, const std::vector<Range>& support,
              int axis, int knots = 96, double tol = 1e-9);
  double operator()(double x) const;
  double quantile(double p) const;
  double total() const { return cdf_.back(); }

 private:
  std::vector<double> x_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  double lo_mass_ = 0.0;
};

/// Tables a pushforward check needs; independent of the seed.
struct PushforwardTables {
  std::vector<MarginalCdf> margins;
  std::vector<double> edges0;
  std::vector<double> edges1;
  std::vector<double> cell_probs;  // row-major over (edges0, edges1) cells
};

/// bins x bins cells at the marginal quantiles. Smaller knots and a looser
/// tol give the quick tables used with small samples.
PushforwardTables build_pushforward_tables(const FamilyCase& c, int bins = 8,
                                           int knots = 96, double tol = 1e-9);

/// Marginal KS (p > 0.01) for both coordinates and a chi-square test on the
/// 2-d histogram (p > 0.001). residual is the largest statistic / critical
/// value ratio; tolerance is 1.
CheckReport pushforward_check(const FamilyCase& c,
                              const PushforwardTables& tables,
                              std::int64_t draws, std::uint64_t seed);
CheckReport pushforward_check(const FamilyCase& c, std::int64_t draws,
                              std::uint64_t seed);

//---------------------------------------------------------------------------
// Suites
//---------------------------------------------------------------------------

/// Base seed of the shipped check suites.
inline constexpr std::uint64_t kDefaultCheckSeed = 20;

struct SuiteOptions {
  /// First of `seeds` consecutive seeds.
  std::uint64_t seed = kDefaultCheckSeed;
  std::int64_t draws = 100000;
  /// Number of consecutive seeds that must all pass.
  int seeds = 3;
  /// Test hook: multiplies every density under test by two.
  bool corrupt = false;
};

std::vector<CheckReport> normalization_suite(const SuiteOptions& o);
std::vector<CheckReport> identities_suite(const SuiteOptions& o);
std::vector<CheckReport> pushforward_suite(const SuiteOptions& o);

}  // namespace multivec

#endif  // MULTIVEC_VALIDATION_HPP_
