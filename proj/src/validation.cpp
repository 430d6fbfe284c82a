// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/validation.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "multivec/densities.hpp"
#include "multivec/errors.hpp"
#include "multivec/generators.hpp"
#include "multivec/json_format.hpp"
#include "multivec/special.hpp"

namespace multivec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

CheckReport make_report(std::string name, double residual, double tolerance,
                        std::string details) {
  CheckReport r;
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual <= tolerance;
  r.details = std::move(details);
  return r;
}

std::string to_json_line(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  j["details"] = r.details;
  return canonical_dump(j);
}

//---------------------------------------------------------------------------
// Goodness of fit
//---------------------------------------------------------------------------

double kolmogorov_sf(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.18) {
    // Jacobi theta form of the CDF, which converges fast for small x.
    double w = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      double term = std::exp(-(2 * k - 1) * (2 * k - 1) * w);
      s += term;
      if (term < 1e-300) break;
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

double kolmogorov_quantile_upper(double alpha) {
  double lo = 0.1;
  double hi = 6.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (kolmogorov_sf(mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

namespace {
double stephens(double n) { return std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n); }
}  // namespace

KsResult ks_one_sample(std::vector<double> xs,
                       const std::function<double(double)>& cdf) {
  if (xs.empty()) throw EmptySample("KS test needs at least one value");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n,
                  static_cast<double>(i + 1) / n - f});
  }
  return {d, kolmogorov_sf(stephens(n) * d), xs.size()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("KS test needs two samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  double ne = na * nb / (na + nb);
  return {d, kolmogorov_sf(stephens(ne) * d), a.size() + b.size()};
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) return 1.0;
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

Chi2Result chi2_gof(const std::vector<double>& observed,
                    const std::vector<double>& expected, double min_expected) {
  if (observed.size() != expected.size()) {
    throw DimensionMismatch("observed and expected differ in length");
  }
  std::vector<double> o;
  std::vector<double> e;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = 0.0;
      acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) {
      o.push_back(acc_o);
      e.push_back(acc_e);
    } else {
      o.back() += acc_o;
      e.back() += acc_e;
    }
  }
  Chi2Result r;
  for (std::size_t i = 0; i < o.size(); ++i) {
    double diff = o[i] - e[i];
    r.statistic += e[i] > 0.0 ? diff * diff / e[i] : (o[i] > 0.0 ? kInf : 0.0);
  }
  r.dof = static_cast<double>(o.size()) - 1.0;
  r.p_value = chi2_sf(r.statistic, r.dof);
  return r;
}

//---------------------------------------------------------------------------
// Families
//---------------------------------------------------------------------------

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Matrix scalar_matrix(double s) { return Matrix::Constant(1, 1, s); }

std::vector<Vector> split_scalars(const Vector& x) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out.push_back(vec({x(i)}));
  return out;
}

Vector join_scalars(const std::vector<Vector>& blocks) {
  Vector out(static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) out(i) = blocks[i](0);
  return out;
}

MvEllipticalParams scalar_blocks(std::vector<double> mus,
                                 std::vector<double> vars) {
  MvEllipticalParams p;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    p.partition.dims.push_back(1);
    p.mus.push_back(vec({mus[i]}));
    p.sigmas.push_back(scalar_matrix(vars[i]));
  }
  return p;
}

// Densities that reject non-positive input are extended by zero there, so
// quadrature nodes on the boundary of the support are harmless.
LogDensity positive_part(LogDensity f, std::vector<int> axes) {
  return [f = std::move(f), axes = std::move(axes)](const Vector& x) {
    for (int a : axes) {
      if (!(x(a) > 0.0)) return -kInf;
    }
    return f(x);
  };
}

BetaParams beta_case_params() {
  BetaParams p;
  p.shape.alpha0 = 1.5;
  p.shape.alphas = {1.0, 2.0};
  p.betas = {1.0, 3.0};
  return p;
}

}  // namespace

std::vector<FamilyCase> standard_cases() {
  std::vector<FamilyCase> cases;

  {
    auto p = scalar_blocks({0.5, -1.0}, {2.0, 0.5});
    auto g = GeneratorSpec::pearson7(3.0, 3.0);
    cases.push_back({"mv-elliptical/pearson7",
                     [=](const Vector& x) { return logpdf_mv_elliptical(p, g, x); },
                     [=](Rng& rng) { return sample_mv_elliptical(p, g, rng); },
                     {real_line(0.5, 1.4), real_line(-1.0, 0.7)},
                     false});
  }
  {
    MvEllipticalParams p;
    p.partition.dims = {2};
    p.mus = {vec({0.0, 0.0})};
    Matrix s(2, 2);
    s << 1.0, 0.6, 0.6, 2.0;
    p.sigmas = {s};
    auto g = GeneratorSpec::bessel(0.7, 0.5);
    cases.push_back({"mv-elliptical/bessel",
                     [=](const Vector& x) { return logpdf_mv_elliptical(p, g, x); },
                     [=](Rng& rng) { return sample_mv_elliptical(p, g, rng); },
                     {real_line(0.0, 1.0), real_line(0.0, 1.4)},
                     false});
  }
  {
    auto p = scalar_blocks({0.0, 0.3}, {0.25, 0.16});
    auto g = GeneratorSpec::kotz(0.8, 1.5, 1.0);
    cases.push_back(
        {"mv-log-elliptical/kotz",
         positive_part(
             [=](const Vector& v) { return logpdf_mv_log_elliptical(p, g, v); },
             {0, 1}),
         [=](Rng& rng) { return sample_mv_log_elliptical(p, g, rng); },
         {half_line(0.0, 1.0), half_line(0.0, 1.3)},
         false});
  }
  {
    auto p = scalar_blocks({0.0, 0.2}, {1.0, 0.25});
    auto g = GeneratorSpec::pearson2(1.5);
    cases.push_back(
        {"mixed-ell-logell/pearson2",
         positive_part(
             [=](const Vector& z) {
               return logpdf_mixed_ell_logell(p, 1, g, z.head(1), z.tail(1));
             },
             {1}),
         [=](Rng& rng) {
           auto [x, v] = sample_mixed_ell_logell(p, 1, g, rng);
           return vec({x(0), v(0)});
         },
         {finite_range(-1.0, 1.0),
          finite_range(std::exp(0.2 - 0.5), std::exp(0.2 + 0.5))},
         false});
  }
  MvTParams tp;
  tp.dims = {1, 1};
  tp.alpha0 = 1.5;
  tp.betas = {1.0, 2.0};
  cases.push_back({"mv-t",
                   [=](const Vector& t) { return logpdf_mv_t(tp, split_scalars(t)); },
                   [=](Rng& rng) { return join_scalars(sample_mv_t(tp, rng)); },
                   {real_line(0.0, 1.0), real_line(0.0, 1.4)},
                   false});
  cases.push_back(
      {"mv-pearson2",
       [=](const Vector& r) { return logpdf_mv_pearson2(tp, split_scalars(r)); },
       [=](Rng& rng) { return join_scalars(sample_mv_pearson2(tp, rng)); },
       {finite_range(-1.0, 1.0), finite_range(-1.0, 1.0)},
       false});
  {
    GenGammaPearsonParams p;
    p.dims = {1};
    p.alpha0 = 1.5;
    p.sigma0_sq = 1.0;
    p.sigma_sq = {2.0};
    p.spec = GeneratorSpec::kotz(1.0, 1.5, 1.2);
    cases.push_back(
        {"gengamma-pearson7/kotz",
         [=](const Vector& z) {
           return logpdf_gengamma_pearson7(p, z(0), {z.tail(1)});
         },
         [=](Rng& rng) {
           auto d = sample_gengamma_pearson7(p, rng);
           return vec({d.s0, d.blocks[0](0)});
         },
         {half_line(0.0, 1.0), real_line(0.0, 1.4)},
         false});
    p.spec = GeneratorSpec::pearson7(2.0, 3.5);
    cases.push_back(
        {"gengamma-pearson2/pearson7",
         [=](const Vector& z) {
           return logpdf_gengamma_pearson2(p, z(0), {z.tail(1)});
         },
         [=](Rng& rng) {
           auto d = sample_gengamma_pearson2(p, rng);
           return vec({d.s0, d.blocks[0](0)});
         },
         {half_line(0.0, 1.0), finite_range(-1.0, 1.0)},
         false});
  }
  {
    ScaleShapeParams p{{1.5, 2.0}, {1.0, 0.5}};
    auto g = GeneratorSpec::kotz(1.0, 2.0, 1.5);
    cases.push_back({"mv-gengamma/kotz",
                     positive_part(
                         [=](const Vector& u) { return logpdf_mv_gengamma(p, g, u); },
                         {0, 1}),
                     [=](Rng& rng) { return sample_mv_gengamma(p, g, rng); },
                     {half_line(0.0, 1.0), half_line(0.0, 1.0)},
                     true});
  }
  {
    BetaParams p = beta_case_params();
    cases.push_back({"mv-beta1",
                     [=](const Vector& b) { return logpdf_mv_beta1(p, b); },
                     [=](Rng& rng) { return sample_mv_beta1(p, rng); },
                     {finite_range(0.0, 1.0), finite_range(0.0, 1.0)},
                     true});
    cases.push_back({"mv-beta2",
                     positive_part(
                         [=](const Vector& f) { return logpdf_mv_beta2(p, f); },
                         {0, 1}),
                     [=](Rng& rng) { return sample_mv_beta2(p, rng); },
                     {half_line(0.0, 1.0), half_line(0.0, 3.0)},
                     true});
  }
  {
    GenGammaBetaParams p;
    p.shape.alpha0 = 2.0;
    p.shape.alphas = {1.5};
    p.sigma0_sq = 1.0;
    p.sigma_sq = {2.0};
    p.spec = GeneratorSpec::bessel(1.0, 0.5);
    cases.push_back(
        {"gengamma-beta1/bessel",
         [=](const Vector& z) {
           return logpdf_gengamma_beta1(p, z(0), z.tail(1));
         },
         [=](Rng& rng) {
           auto [s0, b] = sample_gengamma_beta1(p, rng);
           return vec({s0, b(0)});
         },
         {half_line(0.0, 4.0), finite_range(0.0, 1.0)},
         false});
    p.spec = GeneratorSpec::pearson7(1.0, 5.0);
    cases.push_back(
        {"gengamma-beta2/pearson7",
         positive_part(
             [=](const Vector& z) {
               return logpdf_gengamma_beta2(p, z(0), z.tail(1));
             },
             {0, 1}),
         [=](Rng& rng) {
           auto [s0, f] = sample_gengamma_beta2(p, rng);
           return vec({s0, f(0)});
         },
         {half_line(0.0, 1.0), half_line(0.0, 2.0)},
         false});
  }
  {
    GammaLogGammaParams p;
    p.alphas = {2.0};
    p.sigma_sq = {1.0};
    p.rhos = {1.5};
    p.delta_sq = {0.5};
    p.spec = GeneratorSpec::kotz(1.0, 1.5, 1.0);
    cases.push_back(
        {"gamma-loggamma/kotz",
         positive_part(
             [=](const Vector& z) {
               return logpdf_gamma_loggamma(p, z.head(1), z.tail(1));
             },
             {0}),
         [=](Rng& rng) {
           auto [u, y] = sample_gamma_loggamma(p, rng);
           return vec({u(0), y(0)});
         },
         {half_line(0.0, 2.0), real_line(0.0, 1.0)},
         true});
  }
  return cases;
}

FamilyCase uncorrected_beta1_case() {
  BetaParams p = beta_case_params();
  return {"mv-beta1/uncorrected-exponent",
          [=](const Vector& b) {
            double v = logpdf_mv_beta1(p, b);
            if (std::isinf(v)) return v;
            // The (1 - b_i) exponent without the alpha_0 term.
            for (Eigen::Index i = 0; i < b.size(); ++i) {
              v -= p.shape.alpha0 * std::log1p(-b(i));
            }
            return v;
          },
          [=](Rng& rng) { return sample_mv_beta1(p, rng); },
          {finite_range(0.0, 1.0), finite_range(0.0, 1.0)},
          true};
}

namespace {

// Quadrature over a finite range restricted to where f is positive. The
// range is scanned at 64 midpoints and each run of positive values is
// widened to its exact ends by bisection, so densities whose support ends
// inside the box (Pearson II type kernels) are integrated between their
// support edges, where double-exponential rules converge quickly.
double integrate_trimmed(const std::function<double(double)>& f,
                         const Range& r, double tol) {
  if (std::isinf(r.lo) || std::isinf(r.hi)) return integrate(f, r, tol);
  constexpr int kScan = 64;
  double h = (r.hi - r.lo) / kScan;
  std::vector<double> mid(kScan);
  std::vector<bool> pos(kScan);
  for (int i = 0; i < kScan; ++i) {
    mid[i] = r.lo + (i + 0.5) * h;
    double v = f(mid[i]);
    pos[i] = std::isfinite(v) && v > 0.0;
  }
  auto edge = [&](double inside, double outside) {
    for (int k = 0; k < 60; ++k) {
      double m = 0.5 * (inside + outside);
      double v = f(m);
      if (std::isfinite(v) && v > 0.0) {
        inside = m;
      } else {
        outside = m;
      }
    }
    return inside;
  };
  double total = 0.0;
  int i = 0;
  while (i < kScan) {
    if (!pos[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < kScan && pos[j + 1]) ++j;
    double a = i == 0 ? r.lo : edge(mid[i], mid[i - 1]);
    double b = j == kScan - 1 ? r.hi : edge(mid[j], mid[j + 1]);
    total += integrate(f, finite_range(a, b), tol);
    i = j + 1;
  }
  return total;
}

double nested_trimmed(const std::function<double(const Vector&)>& f,
                      const std::vector<Range>& ranges, Vector& x,
                      std::size_t level, double tol) {
  auto g = [&](double t) {
    x(static_cast<Eigen::Index>(level)) = t;
    if (level + 1 == ranges.size()) return f(x);
    return nested_trimmed(f, ranges, x, level + 1, tol);
  };
  return integrate_trimmed(g, ranges[level], tol);
}

double integrate_box(const std::function<double(const Vector&)>& f,
                     const std::vector<Range>& ranges, double tol) {
  if (ranges.empty() || ranges.size() > 3) {
    throw PreconditionError("quadrature checks support 1 to 3 dimensions");
  }
  Vector x = Vector::Zero(static_cast<Eigen::Index>(ranges.size()));
  return nested_trimmed(f, ranges, x, 0, tol);
}

}  // namespace

//---------------------------------------------------------------------------
// Normalization

//---------------------------------------------------------------------------

CheckReport quad_normalization(const std::string& name,
                               const LogDensity& logpdf,
                               const std::vector<Range>& support,
                               double tolerance, double quad_tol) {
  double total = integrate_box(
      [&](const Vector& x) { return std::exp(logpdf(x)); }, support, quad_tol);
  std::ostringstream d;
  d << "integral=" << format_double(total);
  return make_report(name, std::abs(total - 1.0), tolerance, d.str());
}

CheckReport mc_normalization(const std::string& name, const LogDensity& logpdf,
                             const Proposal& proposal, std::int64_t n,
                             std::uint64_t seed) {
  if (n < 2) throw PreconditionError("need at least two draws");
  Matrix lw = sample_rows(n, 1, seed, [&](Rng& rng, double* out) {
    Vector x = proposal.sample(rng);
    out[0] = logpdf(x) - proposal.logpdf(x);
  });
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::int64_t i = 0; i < n; ++i) {
    double w = std::isnan(lw(i, 0)) ? 0.0 : std::exp(lw(i, 0));
    s1.add(w);
    s2.add(w * w);
  }
  double nn = static_cast<double>(n);
  double mean = s1.value() / nn;
  double var = std::max(0.0, s2.value() / nn - mean * mean) * nn / (nn - 1.0);
  double se = std::sqrt(var / nn);
  double ess = s2.value() > 0.0 ? s1.value() * s1.value() / s2.value() : 0.0;
  if (ess < nn / 100.0) {
    throw DegenerateWeights("effective sample size " + format_double(ess) +
                            " below N/100");
  }
  std::ostringstream d;
  d << "estimate=" << format_double(mean) << " se=" << format_double(se)
    << " ess=" << format_double(ess);
  return make_report(name, std::abs(mean - 1.0), 3.0 * se, d.str());
}

//---------------------------------------------------------------------------
// Jacobian check
//---------------------------------------------------------------------------

double jacobian_log_density(int n, const Vector& y) {
  // f_Y(y) = f_X(x) (1 - |x|^2)^(n/2 + 1) with f_X = 1 / vol(ball) and
  // 1 - |x|^2 = 1 / (1 + |y|^2).
  double half_n = 0.5 * n;
  double log_vol = half_n * std::log(std::numbers::pi) - log_gamma(half_n + 1.0);
  return -log_vol - (half_n + 1.0) * std::log1p(y.squaredNorm());
}

Vector ball_to_space(const Vector& x) {
  double q = x.squaredNorm();
  if (!(q < 1.0)) throw PreconditionError("point outside the open unit ball");
  return x / std::sqrt(1.0 - q);
}

Vector space_to_ball(const Vector& y) {
  return y / std::sqrt(1.0 + y.squaredNorm());
}

CheckReport jacobian_check(int n, std::int64_t draws, std::uint64_t seed,
                           double log_scale) {
  if (n < 1) throw PreconditionError("dimension must be >= 1");
  const std::vector<double> edges{0.0, 0.25, 0.5, 0.75, 1.0, 1.5,
                                  2.0, 3.0,  5.0, 10.0, kInf};
  std::size_t nb = edges.size() - 1;
  // Radial law of |y| implied by the Jacobian density.
  double log_area = std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) -
                    log_gamma(0.5 * n);
  auto radial = [&](double rho) {
    if (!(rho > 0.0)) return 0.0;
    Vector y = Vector::Zero(n);
    y(0) = rho;
    return std::exp(log_area + (n - 1) * std::log(rho) +
                    jacobian_log_density(n, y) + log_scale);
  };
  std::vector<double> expected;
  for (std::size_t b = 0; b < nb; ++b) {
    double p = std::isinf(edges[b + 1])
                   ? integrate(radial, half_line(edges[b], edges[b]), 1e-12)
                   : integrate(radial, finite_range(edges[b], edges[b + 1]),
                               1e-12);
    // Cells split by the sign of y_1, which is symmetric.
    expected.push_back(0.5 * p * static_cast<double>(draws));
    expected.push_back(0.5 * p * static_cast<double>(draws));
  }
  Matrix cells = sample_rows(draws, 1, seed, [&](Rng& rng, double* out) {
    Vector x = std::pow(rng.uniform(), 1.0 / n) * sample_unit_sphere(n, rng);
    Vector y = ball_to_space(x);
    double rho = y.norm();
    std::size_t b = static_cast<std::size_t>(
        std::upper_bound(edges.begin() + 1, edges.end() - 1, rho) -
        (edges.begin() + 1));
    out[0] = static_cast<double>(2 * b + (y(0) < 0.0 ? 1 : 0));
  });
  std::vector<double> observed(2 * nb, 0.0);
  for (Eigen::Index i = 0; i < cells.rows(); ++i) {
    observed[static_cast<std::size_t>(cells(i, 0))] += 1.0;
  }
  Chi2Result c = chi2_gof(observed, expected);
  double crit = 0.0;
  {
    boost::math::chi_squared dist(c.dof);
    crit = boost::math::quantile(boost::math::complement(dist, 0.001));
  }
  std::ostringstream d;
  d << "n=" << n << " chi2=" << format_double(c.statistic)
    << " dof=" << c.dof << " p=" << format_double(c.p_value);
  return make_report("identity/jacobian/n=" + std::to_string(n), c.statistic,
                     crit, d.str());
}

//---------------------------------------------------------------------------
// Marginal CDF tables
//---------------------------------------------------------------------------

namespace {

double hermite(double t, double h, double fa, double pa, double fb, double pb) {
  double t2 = t * t;
  double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * fa + (t3 - 2 * t2 + t) * h * pa +
         (-2 * t3 + 3 * t2) * fb + (t3 - t2) * h * pb;
}

constexpr double kTableTail = 1e-9;

}  // namespace

MarginalCdf::MarginalCdf(const LogDensity& logpdf,
                         const std::vector<Range>& support, int axis,
                         int knots, double tol) {
  if (support.size() != 2 || axis < 0 || axis > 1) {
    throw PreconditionError("marginal tables need a two-dimensional support");
  }
  const Range& r = support[axis];
  const Range& other = support[1 - axis];
  auto marginal_at = [&](double x, double t) {
    return integrate_trimmed(
        [&](double y) {
          Vector z(2);
          z(axis) = x;
          z(1 - axis) = y;
          return std::exp(logpdf(z));
        },
        other, t);
  };
  auto marginal = [&](double x) { return marginal_at(x, tol); };
  // Tail masses only decide where the grid stops, so a few digits suffice
  // except for the final lower tail.
  auto tail_above = [&](double x, double t) {
    return integrate([&](double y) { return marginal_at(y, t); },
                     half_line(x, r.scale), t);
  };
  auto tail_below = [&](double x, double t) {
    Range below;
    below.lo = -kInf;
    below.hi = x;
    below.center = x;
    below.scale = r.scale;
    return integrate([&](double y) { return marginal_at(y, t); }, below, t);
  };
  const double probe_tol = std::max(tol, 1e-5);
  bool lo_inf = std::isinf(r.lo);
  bool hi_inf = std::isinf(r.hi);
  double a = lo_inf ? (hi_inf ? r.center : r.hi) - 8.0 * r.scale : r.lo;
  double b = hi_inf ? (lo_inf ? r.center : r.lo) + 8.0 * r.scale : r.hi;
  std::vector<double> xs;
  double h = (b - a) / knots;
  for (int i = 0; i <= knots; ++i) xs.push_back(a + h * i);
  // Finite ends often carry power-law behaviour; refine geometrically.
  for (int k = 1; k <= 12; ++k) {
    if (!lo_inf) xs.push_back(a + h * std::ldexp(1.0, -k));
    if (!hi_inf) xs.push_back(b - h * std::ldexp(1.0, -k));
  }
  // Infinite ends: geometric extension until the remaining tail is
  // negligible.
  double mid = 0.5 * (a + b);
  for (int side = 0; side < 2; ++side) {
    bool open = side == 0 ? lo_inf : hi_inf;
    if (!open) continue;
    double edge = side == 0 ? a : b;
    for (int k = 1; k <= 400; ++k) {
      double x = mid + (edge - mid) * std::pow(1.2, k);
      xs.push_back(x);
      if (k % 4 == 0 &&
          (side == 0 ? tail_below(x, probe_tol) : tail_above(x, probe_tol)) <
              std::max(kTableTail, tol)) {
        break;
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  x_ = xs;
  lo_mass_ = lo_inf ? tail_below(xs.front(), tol) : 0.0;
  cdf_.assign(xs.size(), 0.0);
  pdf_.assign(xs.size(), 0.0);
  cdf_[0] = lo_mass_;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pdf_[i] = marginal(xs[i]);
    if (i > 0) {
      // Knots are graded toward the ends, so a fixed Gauss rule per
      // interval is enough and costs far fewer nested evaluations than
      // adaptive quadrature.
      cdf_[i] = cdf_[i - 1] +
                boost::math::quadrature::gauss<double, 7>::integrate(
                    marginal, xs[i - 1], xs[i]);
    }
  }
}

double MarginalCdf::operator()(double x) const {
  if (x <= x_.front()) return x < x_.front() ? 0.0 : cdf_.front();
  if (x >= x_.back()) return cdf_.back();
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - x_.begin());
  std::size_t i = j - 1;
  double h = x_[j] - x_[i];
  double t = (x - x_[i]) / h;
  double v;
  if (std::isfinite(pdf_[i]) && std::isfinite(pdf_[j])) {
    v = hermite(t, h, cdf_[i], pdf_[i], cdf_[j], pdf_[j]);
  } else {
    v = cdf_[i] + t * (cdf_[j] - cdf_[i]);
  }
  return std::clamp(v, cdf_[i], cdf_[j]);
}

double MarginalCdf::quantile(double p) const {
  if (p <= cdf_.front()) return x_.front();
  if (p >= cdf_.back()) return x_.back();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), p);
  std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
  double lo = x_[j - 1];
  double hi = x_[j];
  for (int i = 0; i < 100; ++i) {
    double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

//---------------------------------------------------------------------------
// Pushforward
//---------------------------------------------------------------------------

namespace {

Range cell_range(double lo, double hi, double scale) {
  Range r;
  r.lo = lo;
  r.hi = hi;
  r.scale = scale;
  if (std::isinf(lo) && std::isinf(hi)) {
    r.center = 0.0;
  } else if (std::isinf(lo)) {
    r.center = hi;
  } else if (std::isinf(hi)) {
    r.center = lo;
  } else {
    r.center = 0.5 * (lo + hi);
    r.scale = hi - lo;
  }
  return r;
}

std::size_t bin_of(const std::vector<double>& edges, double x) {
  // Interior edges only; the outer edges are the support bounds.
  auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
  return static_cast<std::size_t>(it - (edges.begin() + 1));
}

}  // namespace

PushforwardTables build_pushforward_tables(const FamilyCase& c, int bins,
                                           int knots, double tol) {
  PushforwardTables t;
  t.margins.emplace_back(c.logpdf, c.support, 0, knots, tol);
  t.margins.emplace_back(c.logpdf, c.support, 1, knots, tol);
  auto edges = [&](int axis) {
    std::vector<double> e{c.support[axis].lo};
    for (int i = 1; i < bins; ++i) {
      e.push_back(t.margins[axis].quantile(static_cast<double>(i) / bins));
    }
    e.push_back(c.support[axis].hi);
    return e;
  };
  t.edges0 = edges(0);
  t.edges1 = edges(1);
  auto density = [&](const Vector& x) { return std::exp(c.logpdf(x)); };
  for (std::size_t i = 0; i + 1 < t.edges0.size(); ++i) {
    for (std::size_t j = 0; j + 1 < t.edges1.size(); ++j) {
      Range r0 = cell_range(t.edges0[i], t.edges0[i + 1], c.support[0].scale);
      Range r1 = cell_range(t.edges1[j], t.edges1[j + 1], c.support[1].scale);
      double p = (r0.hi > r0.lo && r1.hi > r1.lo)
                     ? integrate_box(density, {r0, r1}, 10.0 * tol)
                     : 0.0;
      t.cell_probs.push_back(p);
    }
  }
  return t;
}

CheckReport pushforward_check(const FamilyCase& c,
                              const PushforwardTables& tables,
                              std::int64_t draws, std::uint64_t seed) {
  Matrix x = sample_rows(draws, 2, seed, [&](Rng& rng, double* out) {
    Vector z = c.sample(rng);
    out[0] = z(0);
    out[1] = z(1);
  });
  std::ostringstream d;
  double worst = 0.0;
  double ks_crit = kolmogorov_quantile_upper(0.01) /
                   (std::sqrt(static_cast<double>(draws)) + 0.12 +
                    0.11 / std::sqrt(static_cast<double>(draws)));
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> col(x.col(axis).data(), x.col(axis).data() + draws);
    KsResult ks = ks_one_sample(std::move(col), [&](double v) {
      return tables.margins[axis](v);
    });
    worst = std::max(worst, ks.statistic / ks_crit);
    d << "ks" << axis << "_p=" << format_double(ks.p_value) << ' ';
  }
  std::size_t n1 = tables.edges1.size() - 1;
  std::vector<double> observed(tables.cell_probs.size(), 0.0);
  for (std::int64_t i = 0; i < draws; ++i) {
    std::size_t a = bin_of(tables.edges0, x(i, 0));
    std::size_t b = bin_of(tables.edges1, x(i, 1));
    observed[a * n1 + b] += 1.0;
  }
  std::vector<double> expected;
  for (double p : tables.cell_probs) {
    expected.push_back(p * static_cast<double>(draws));
  }
  Chi2Result chi = chi2_gof(observed, expected);
  double chi_crit = kInf;
  if (chi.dof > 0.0) {
    boost::math::chi_squared dist(chi.dof);
    chi_crit = boost::math::quantile(boost::math::complement(dist, 0.001));
  }
  worst = std::max(worst, chi.statistic / chi_crit);
  d << "chi2_p=" << format_double(chi.p_value) << " seed=" << seed;
  return make_report("pushforward/" + c.name, worst, 1.0, d.str());
}

CheckReport pushforward_check(const FamilyCase& c, std::int64_t draws,
                              std::uint64_t seed) {
  return pushforward_check(c, build_pushforward_tables(c), draws, seed);
}

//---------------------------------------------------------------------------
// Suites
//---------------------------------------------------------------------------

namespace {

FamilyCase maybe_corrupt(FamilyCase c, bool corrupt) {
  if (corrupt) {
    LogDensity f = c.logpdf;
    c.logpdf = [f](const Vector& x) { return f(x) + std::log(2.0); };
  }
  return c;
}

// Every generator kind at a few parameter settings, paired with dimensions
// where the kernel is normalizable.
std::vector<std::pair<GeneratorSpec, double>> identity_grid() {
  std::vector<std::pair<GeneratorSpec, double>> g;
  for (double n : {1.0, 2.0, 3.0, 5.0}) {
    g.emplace_back(GeneratorSpec::gaussian(), n);
    g.emplace_back(GeneratorSpec::kotz(1.0, 2.0, 1.5), n);
    g.emplace_back(GeneratorSpec::kotz(0.3, 0.8, 0.7), n);
    g.emplace_back(GeneratorSpec::pearson7(2.0, 0.5 * n + 1.5), n);
    g.emplace_back(GeneratorSpec::pearson2(0.0), n);
    g.emplace_back(GeneratorSpec::pearson2(2.5), n);
    g.emplace_back(GeneratorSpec::bessel(0.7, 0.5), n);
    g.emplace_back(GeneratorSpec::bessel(1.5, 1.0), n);
  }
  return g;
}

}  // namespace

std::vector<CheckReport> normalization_suite(const SuiteOptions& o) {
  std::vector<CheckReport> out;
  for (const FamilyCase& raw : standard_cases()) {
    FamilyCase c = maybe_corrupt(raw, o.corrupt);
    out.push_back(quad_normalization("normalization/" + c.name, c.logpdf,
                                     c.support, c.scalar ? 1e-5 : 1e-4));
  }
  // Monte-Carlo route for the t family with n0 = 3.
  MvTParams tp;
  tp.dims = {1, 1};
  tp.alpha0 = 1.5;
  tp.betas = {1.0, 0.5};
  double shift = o.corrupt ? std::log(2.0) : 0.0;
  const double sd = 3.0;
  Proposal gauss{
      [sd](Rng& rng) {
        Vector x(2);
        x << sd * rng.normal(), sd * rng.normal();
        return x;
      },
      [sd](const Vector& x) {
        return -std::log(2.0 * std::numbers::pi * sd * sd) -
               0.5 * x.squaredNorm() / (sd * sd);
      }};
  out.push_back(mc_normalization(
      "normalization/mc/mv-t",
      [tp, shift](const Vector& t) {
        return logpdf_mv_t(tp, split_scalars(t)) + shift;
      },
      gauss, 1000000, o.seed));
  return out;
}

std::vector<CheckReport> identities_suite(const SuiteOptions& o) {
  std::vector<CheckReport> out;
  for (const auto& [spec, n] : identity_grid()) {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 4.0}) {
      worst = std::max(worst, radial_integral_identity_check(spec, n, a));
    }
    std::ostringstream name;
    name << "identity/radial-integral/" << spec.describe() << "/n=" << n;
    out.push_back(make_report(name.str(), worst, 1e-6, "a in {0.5, 1, 4}"));
  }
  for (int n = 1; n <= 3; ++n) {
    for (int s = 0; s < o.seeds; ++s) {
      CheckReport r = jacobian_check(n, o.draws, o.seed + s,
                                     o.corrupt ? std::log(2.0) : 0.0);
      r.name += "/seed=" + std::to_string(o.seed + s);
      out.push_back(r);
    }
  }
  return out;
}

std::vector<CheckReport> pushforward_suite(const SuiteOptions& o) {
  std::vector<CheckReport> out;
  for (const FamilyCase& raw : standard_cases()) {
    FamilyCase c = maybe_corrupt(raw, o.corrupt);
    PushforwardTables t = build_pushforward_tables(c);
    for (int s = 0; s < o.seeds; ++s) {
      CheckReport r = pushforward_check(c, t, o.draws, o.seed + s);
      r.name += "/seed=" + std::to_string(o.seed + s);
      out.push_back(r);
    }
  }
  // The check must reject the uncorrected beta type I exponent.
  FamilyCase bad = uncorrected_beta1_case();
  CheckReport r = pushforward_check(bad, o.draws, o.seed);
  out.push_back(make_report("discrimination/" + bad.name,
                            r.residual > 0.0 ? 1.0 / r.residual : kInf, 1.0,
                            "uncorrected density " +
                                std::string(r.passed ? "accepted" : "rejected") +
                                ": " + r.details));
  return out;
}

}  // namespace multivec
