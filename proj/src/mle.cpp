// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "multivec/errors.hpp"
#include "multivec/special.hpp"

namespace multivec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateT = 1e-12;

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

void require_pos(double x, const char* what) {
  if (!finite_pos(x)) {
    throw ParameterOutOfDomain(std::string(what) + " must be positive");
  }
}

double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw NonFiniteLikelihood("log-likelihood is not finite");
  return v;
}

std::vector<double> column(const SampleMatrix& data, int j) {
  std::vector<double> out(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) out[i] = data(i, j);
  return out;
}

void check_data(const SampleMatrix& data) {
  if (data.cols() != 2) {
    throw DimensionMismatch("expected two columns, got " +
                            std::to_string(data.cols()));
  }
  if (data.rows() < 3) {
    throw PreconditionError("need at least 3 observations, got " +
                            std::to_string(data.rows()));
  }
  check_finite(data);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!(data(i, j) > 0.0)) {
        throw NonPositiveInput("row " + std::to_string(i + 1) + " column " +
                               std::to_string(j + 1) + " must be > 0");
      }
    }
  }
}

// Objective wrapper: any domain error becomes +inf for the simplex.
template <class F>
double guarded(F&& f) {
  try {
    double v = f();
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

// Multiplier on (q, s) for run i: 1, 1.2, 0.8, 1.4, 0.6, ...
double restart_factor(int i) {
  if (i == 0) return 1.0;
  int k = (i + 1) / 2;
  double off = 0.2 * k;
  return (i % 2 == 1) ? 1.0 + off : std::max(0.05, 1.0 - off);
}

constexpr const char* kRestartPolicy =
    "gaussian anchor, then (q, s) scaled by 1.2, 0.8, 1.4, 0.6, ...; best "
    "loglik kept";

struct SingleFit {
  std::vector<double> x;  // natural scale
  double loglik = -kInf;
  double initial = -kInf;
  int iterations = 0;
  bool converged = false;
};

// Five-parameter (or two-parameter when frozen) fit of one column.
SingleFit fit_column(std::span<const double> u, const FitOptions& opts) {
  GammaInit g = gamma_init(u);
  SingleFit best;
  int runs = opts.freeze_generator ? 1 : std::max(1, opts.restarts);
  for (int run = 0; run < runs; ++run) {
    double k = restart_factor(run);
    std::vector<double> x0;
    std::function<double(const std::vector<double>&)> f;
    if (opts.freeze_generator) {
      x0 = {std::log(g.sigma), std::log(g.alpha)};
      f = [u](const std::vector<double>& x) {
        return guarded([&] {
          return -loglik_independent(std::exp(x[0]), std::exp(x[1]), 0.5, 1.0,
                                     1.0, u);
        });
      };
    } else {
      x0 = {std::log(g.sigma), std::log(g.alpha), std::log(0.5),
            std::log(1.0 * k), std::log(1.0 * k)};
      f = [u](const std::vector<double>& x) {
        return guarded([&] {
          return -loglik_independent(std::exp(x[0]), std::exp(x[1]),
                                     std::exp(x[2]), std::exp(x[3]),
                                     std::exp(x[4]), u);
        });
      };
    }
    double f0 = f(x0);
    if (!std::isfinite(f0)) continue;
    NelderMeadResult r = nelder_mead(f, x0, opts.optimizer);
    if (run == 0) best.initial = -f0;
    best.iterations += r.iterations;
    if (-r.f > best.loglik) {
      best.loglik = -r.f;
      best.converged = r.converged;
      best.x.clear();
      for (double v : r.x) best.x.push_back(std::exp(v));
      if (opts.freeze_generator) best.x.insert(best.x.end(), {0.5, 1.0, 1.0});
    }
  }
  if (best.x.empty()) {
    throw NonFiniteLikelihood("log-likelihood not finite at any start");
  }
  return best;
}

}  // namespace

void KotzGammaDepParams::validate(int m) const {
  require_pos(sigma1, "sigma1");
  require_pos(sigma2, "sigma2");
  require_pos(alpha, "alpha");
  require_pos(beta, "beta");
  require_pos(r, "r");
  require_pos(s, "s");
  if (!std::isfinite(q)) throw ParameterOutOfDomain("q must be finite");
  double n = 2.0 * m * (alpha + beta);
  if (!(2.0 * q + n > 2.0)) {
    throw ParameterOutOfDomain("Kotz needs 2q + n > 2");
  }
}

SuffStats SuffStats::from_columns(std::span<const double> u,
                                  std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("columns differ in length");
  }
  if (u.empty()) throw EmptySample("no observations");
  CompensatedSum a, b, c, d;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0) || !(v[i] > 0.0) || !std::isfinite(u[i]) ||
        !std::isfinite(v[i])) {
      throw NonPositiveInput("observation " + std::to_string(i + 1) +
                             " must be positive and finite");
    }
    a.add(std::log(u[i]));
    b.add(std::log(v[i]));
    c.add(u[i]);
    d.add(v[i]);
  }
  SuffStats st;
  st.m = static_cast<int>(u.size());
  st.a = a.value();
  st.b = b.value();
  st.c = c.value();
  st.d = d.value();
  return st;
}

double sum_pow(std::span<const double> u, double s) {
  CompensatedSum acc;
  for (double x : u) acc.add(std::pow(x, s));
  return acc.value();
}

double loglik_dependent(const KotzGammaDepParams& p, const SuffStats& st) {
  if (st.m <= 0) throw EmptySample("no observations");
  p.validate(st.m);
  const double m = st.m;
  const double big_m = m * (p.alpha + p.beta);
  const double w = st.c / (p.sigma1 * p.sigma1) + st.d / (p.sigma2 * p.sigma2);
  const double e = p.q + big_m - 1.0;
  double v = std::log(p.s) + e * std::log(p.r) / p.s + log_gamma(big_m) -
             log_gamma(e / p.s) + (p.alpha - 1.0) * st.a +
             (p.beta - 1.0) * st.b -
             m * (2.0 * p.alpha * std::log(p.sigma1) +
                  2.0 * p.beta * std::log(p.sigma2) + log_gamma(p.alpha) +
                  log_gamma(p.beta)) +
             (p.q - 1.0) * std::log(w) - p.r * std::pow(w, p.s);
  return finite_or_throw(v);
}

double loglik_independent(double sigma, double shape, double r, double q,
                          double s, std::span<const double> u) {
  if (u.empty()) throw EmptySample("no observations");
  require_pos(sigma, "sigma");
  require_pos(shape, "shape");
  require_pos(r, "r");
  require_pos(s, "s");
  const double e = q + shape - 1.0;
  if (!(e > 0.0)) throw ParameterOutOfDomain("Kotz needs q + shape > 1");
  CompensatedSum a;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0) || !std::isfinite(u[i])) {
      throw NonPositiveInput("observation " + std::to_string(i + 1) +
                             " must be positive and finite");
    }
    a.add(std::log(u[i]));
  }
  const double m = static_cast<double>(u.size());
  double v = m * std::log(s) + m * e * std::log(r) / s -
             m * log_gamma(e / s) - 2.0 * m * e * std::log(sigma) +
             (e - 1.0) * a.value() -
             r * std::pow(sigma, -2.0 * s) * sum_pow(u, s);
  return finite_or_throw(v);
}

GammaInit gamma_init(std::span<const double> u) {
  if (u.empty()) throw EmptySample("no observations");
  if (u.size() < 2) throw PreconditionError("gamma_init needs m >= 2");
  CompensatedSum su, sl;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0) || !std::isfinite(u[i])) {
      throw NonPositiveInput("observation " + std::to_string(i + 1) +
                             " must be positive and finite");
    }
    su.add(u[i]);
    sl.add(std::log(u[i]));
  }
  const double m = static_cast<double>(u.size());
  GammaInit g;
  g.t = std::log(su.value() / m) - sl.value() / m;
  if (!(g.t > kDegenerateT)) {
    throw DegenerateSample("sample is (numerically) constant");
  }
  const double t = g.t;
  g.alpha = (3.0 - t + std::sqrt((t - 3.0) * (t - 3.0) + 24.0 * t)) / (12.0 * t);
  g.sigma = std::sqrt(su.value() / (2.0 * m * g.alpha));
  return g;
}

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw PreconditionError("nelder_mead needs at least one variable");
  auto eval = [&](const std::vector<double>& x) {
    double v = f(x);
    return std::isnan(v) ? kInf : v;
  };
  double f0 = eval(x0);
  if (!std::isfinite(f0)) {
    throw PreconditionError("objective is not finite at the starting point");
  }

  NelderMeadResult res;
  res.x = x0;
  res.f = f0;
  std::vector<std::vector<double>> pts(n + 1);
  std::vector<double> fv(n + 1);
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  auto affine = [&](const std::vector<double>& base, double t,
                    std::vector<double>& out) {
    // out = centroid + t (base - centroid)
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = centroid[j] + t * (base[j] - centroid[j]);
    }
  };

  for (int round = 0; round <= std::max(0, opts.polish); ++round) {
    const double start_f = res.f;
    pts[0] = res.x;
    fv[0] = res.f;
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1] = res.x;
      pts[i + 1][i] += opts.step;
      fv[i + 1] = eval(pts[i + 1]);
    }
    bool converged = false;
    while (res.iterations < opts.max_iters) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];
      const double spread = fv[worst] - fv[best];
      if (spread <= opts.ftol * std::max(1.0, std::abs(fv[best]))) {
        converged = true;
        break;
      }
      ++res.iterations;
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      affine(pts[worst], -1.0, xr);
      const double fr = eval(xr);
      if (fr < fv[best]) {
        affine(pts[worst], -2.0, xe);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[worst] = xe;
          fv[worst] = fe;
        } else {
          pts[worst] = xr;
          fv[worst] = fr;
        }
        continue;
      }
      if (fr < fv[second]) {
        pts[worst] = xr;
        fv[worst] = fr;
        continue;
      }
      // Outside contraction when the reflection beats the worst point,
      // inside contraction otherwise.
      const bool outside = fr < fv[worst];
      affine(pts[worst], outside ? -0.5 : 0.5, xc);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fv[worst])) {
        pts[worst] = xc;
        fv[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < n; ++j) {
          pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
        }
        fv[i] = eval(pts[i]);
      }
    }
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    if (fv[best] <= res.f) {
      res.x = pts[best];
      res.f = fv[best];
    }
    res.converged = converged;
    if (!converged) break;
    const double gain = start_f - res.f;
    if (round > 0 && gain <= opts.ftol * std::max(1.0, std::abs(res.f))) break;
  }
  return res;
}

FitResult fit_dependent(const SampleMatrix& data, const FitOptions& opts) {
  check_data(data);
  const std::vector<double> u = column(data, 0);
  const std::vector<double> v = column(data, 1);
  const SuffStats st = SuffStats::from_columns(u, v);
  const GammaInit gu = gamma_init(u);
  const GammaInit gv = gamma_init(v);

  auto params_of = [&](const std::vector<double>& x) {
    KotzGammaDepParams p;
    p.sigma1 = std::exp(x[0]);
    p.alpha = std::exp(x[1]);
    p.sigma2 = std::exp(x[2]);
    p.beta = std::exp(x[3]);
    if (!opts.freeze_generator) {
      p.r = std::exp(x[4]);
      p.q = std::exp(x[5]);
      p.s = std::exp(x[6]);
    }
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    return guarded([&] { return -loglik_dependent(params_of(x), st); });
  };

  FitResult out;
  out.mode = opts.freeze_generator ? "dependent-gaussian" : "dependent";
  out.restart_policy = opts.freeze_generator ? "single run" : kRestartPolicy;
  double best_ll = -kInf;
  std::vector<double> best_x;
  int runs = opts.freeze_generator ? 1 : std::max(1, opts.restarts);
  for (int run = 0; run < runs; ++run) {
    const double k = restart_factor(run);
    std::vector<double> x0 = {std::log(gu.sigma), std::log(gu.alpha),
                              std::log(gv.sigma), std::log(gv.alpha)};
    if (!opts.freeze_generator) {
      x0.insert(x0.end(), {std::log(0.5), std::log(k), std::log(k)});
    }
    const double f0 = objective(x0);
    if (run == 0) {
      if (!std::isfinite(f0)) {
        throw NonFiniteLikelihood("log-likelihood not finite at the start");
      }
      out.initial_loglik = -f0;
    }
    if (!std::isfinite(f0)) continue;
    NelderMeadResult r = nelder_mead(objective, x0, opts.optimizer);
    out.iterations += r.iterations;
    if (run > 0) ++out.restarts;
    if (-r.f > best_ll) {
      best_ll = -r.f;
      best_x = r.x;
      out.converged = r.converged;
    }
  }
  const KotzGammaDepParams p = params_of(best_x);
  out.loglik = best_ll;
  out.params = {{"sigma1", p.sigma1}, {"alpha", p.alpha}, {"sigma2", p.sigma2},
                {"beta", p.beta},     {"r", p.r},         {"q", p.q},
                {"s", p.s}};
  return out;
}

FitResult fit_independent(const SampleMatrix& data, const FitOptions& opts) {
  check_data(data);
  const std::vector<double> u = column(data, 0);
  const std::vector<double> v = column(data, 1);
  const SingleFit fu = fit_column(u, opts);
  const SingleFit fv = fit_column(v, opts);

  FitResult out;
  out.mode = opts.freeze_generator ? "independent-gaussian" : "independent";
  out.restart_policy = opts.freeze_generator ? "single run" : kRestartPolicy;
  out.loglik = fu.loglik + fv.loglik;
  out.initial_loglik = fu.initial + fv.initial;
  out.iterations = fu.iterations + fv.iterations;
  out.converged = fu.converged && fv.converged;
  out.restarts = opts.freeze_generator ? 0 : 2 * (std::max(1, opts.restarts) - 1);
  out.params = {{"sigma1", fu.x[0]}, {"alpha", fu.x[1]}, {"r1", fu.x[2]},
                {"q1", fu.x[3]},     {"s1", fu.x[4]},    {"sigma2", fv.x[0]},
                {"beta", fv.x[1]},   {"r2", fv.x[2]},    {"q2", fv.x[3]},
                {"s2", fv.x[4]}};
  return out;
}

}  // namespace multivec
