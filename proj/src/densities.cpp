// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/densities.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "multivec/special.hpp"

namespace multivec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogPi = std::log(std::numbers::pi);

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(const std::vector<double>& xs, const char* what) {
  for (double x : xs) {
    if (!finite_pos(x)) {
      throw ParameterOutOfDomain(std::string(what) + " must be positive");
    }
  }
}

void check_blocks(const std::vector<int>& dims, const std::vector<Vector>& b) {
  if (b.size() != dims.size()) {
    throw DimensionMismatch("expected " + std::to_string(dims.size()) +
                            " blocks, got " + std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (b[i].size() != dims[i]) {
      throw DimensionMismatch("block " + std::to_string(i) + " has length " +
                              std::to_string(b[i].size()) + ", expected " +
                              std::to_string(dims[i]));
    }
  }
}

void check_dims(const std::vector<int>& dims, bool allow_empty) {
  if (dims.empty() && !allow_empty) {
    throw ParameterOutOfDomain("need at least one block");
  }
  for (int d : dims) {
    if (d < 1) throw ParameterOutOfDomain("block dimension must be >= 1");
  }
}

// log of prod_j (1 - rho_j) + sum_i rho_i / beta_i prod_{j != i} (1 - rho_j)
// for rho_j in [0, 1).
double log_pearson2_bracket(const std::vector<double>& rho,
                            const std::vector<double>& betas) {
  std::size_t k = rho.size();
  double prod = 1.0;
  for (double r : rho) prod *= 1.0 - r;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double term = rho[i] / betas[i];
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) term *= 1.0 - rho[j];
    }
    sum += term;
  }
  return std::log(prod + sum);
}

// Negative log of the mv_t / mv_pearson2 normalizer.
double mv_t_log_const(const MvTParams& p) {
  double a_star = p.alpha_star();
  double c = log_gamma(a_star) - log_gamma(p.alpha0);
  for (std::size_t i = 0; i < p.dims.size(); ++i) {
    double h = 0.5 * p.dims[i];
    c -= h * (std::log(p.betas[i]) + kLogPi);
  }
  return c;
}

}  // namespace

double logpdf_mv_elliptical(const MvEllipticalParams& p, const BlockFactors& f,
                            const GeneratorSpec& spec, const Vector& x) {
  double q = block_quadform(p, f, x);
  return -0.5 * f.logdet_sum + log_h(spec, q, p.partition.total());
}

double logpdf_mv_elliptical(const MvEllipticalParams& p,
                            const GeneratorSpec& spec, const Vector& x) {
  return logpdf_mv_elliptical(p, factorize_blocks(p), spec, x);
}

double logpdf_mv_log_elliptical(const MvEllipticalParams& p,
                                const GeneratorSpec& spec, const Vector& v) {
  if (v.size() != p.partition.total()) {
    throw DimensionMismatch("vector length does not match partition");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      throw NonPositiveInput("log-elliptical coordinate " + std::to_string(i) +
                             " must be > 0");
    }
  }
  Vector lv = v.array().log();
  return logpdf_mv_elliptical(p, spec, lv) - lv.sum();
}

double logpdf_mixed_ell_logell(const MvEllipticalParams& p, int k1,
                               const GeneratorSpec& spec, const Vector& x,
                               const Vector& v) {
  p.validate();
  int k = p.partition.k();
  if (k1 < 0 || k1 > k) throw DimensionMismatch("k1 must lie in [0, k]");
  int n1 = 0;
  for (int i = 0; i < k1; ++i) n1 += p.partition.dims[i];
  int n2 = p.partition.total() - n1;
  if (x.size() != n1 || v.size() != n2) {
    throw DimensionMismatch("linear/log parts do not match the partition");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      throw NonPositiveInput("log-elliptical coordinate " + std::to_string(i) +
                             " must be > 0");
    }
  }
  Vector z(n1 + n2);
  Vector lv = v.array().log();
  z << x, lv;
  return logpdf_mv_elliptical(p, spec, z) - lv.sum();
}

MvTParams MvTParams::from_partition(const Partition& p,
                                    std::vector<double> betas) {
  p.validate();
  if (!p.n0) throw ParameterOutOfDomain("t family needs n0");
  return MvTParams{p.dims, 0.5 * *p.n0, std::move(betas)};
}

double MvTParams::alpha_star() const {
  double s = alpha0;
  for (int d : dims) s += 0.5 * d;
  return s;
}

void MvTParams::validate() const {
  check_dims(dims, false);
  if (!finite_pos(alpha0)) throw ParameterOutOfDomain("alpha0 must be > 0");
  if (betas.size() != dims.size()) {
    throw DimensionMismatch("need one beta per block");
  }
  require_positive(betas, "beta");
}

double logpdf_mv_t(const MvTParams& p, const std::vector<Vector>& t) {
  p.validate();
  check_blocks(p.dims, t);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += t[i].squaredNorm() / p.betas[i];
  return mv_t_log_const(p) - p.alpha_star() * std::log1p(s);
}

double logpdf_mv_pearson2(const MvTParams& p, const std::vector<Vector>& r) {
  p.validate();
  check_blocks(p.dims, r);
  std::vector<double> rho(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    rho[i] = r[i].squaredNorm();
    if (!(rho[i] < 1.0)) return -kInf;
  }
  double a_star = p.alpha_star();
  double v = mv_t_log_const(p);
  for (std::size_t i = 0; i < r.size(); ++i) {
    v += (a_star - 0.5 * p.dims[i] - 1.0) * std::log1p(-rho[i]);
  }
  return v - a_star * log_pearson2_bracket(rho, p.betas);
}

double GenGammaPearsonParams::alpha_star() const {
  double s = alpha0;
  for (int d : dims) s += 0.5 * d;
  return s;
}

void GenGammaPearsonParams::validate() const {
  check_dims(dims, true);
  if (!finite_pos(alpha0)) throw ParameterOutOfDomain("alpha0 must be > 0");
  if (!finite_pos(sigma0_sq)) throw ParameterOutOfDomain("sigma0^2 must be > 0");
  if (sigma_sq.size() != dims.size()) {
    throw DimensionMismatch("need one sigma^2 per block");
  }
  require_positive(sigma_sq, "sigma^2");
  check_generator(spec, 2.0 * alpha_star());
}

namespace {

// Shared by the Pearson VII / II joint laws: g = sum sigma_i^-2 |t_i|^2.
double gengamma_pearson_core(const GenGammaPearsonParams& p, double s0,
                             double g) {
  double a_star = p.alpha_star();
  double c = p.alpha0 * kLogPi - log_gamma(p.alpha0) -
             p.alpha0 * std::log(p.sigma0_sq);
  for (std::size_t i = 0; i < p.dims.size(); ++i) {
    c -= 0.5 * p.dims[i] * std::log(p.sigma_sq[i]);
  }
  double w = s0 / p.sigma0_sq * (1.0 + p.sigma0_sq * g);
  return c + (a_star - 1.0) * std::log(s0) + log_h(p.spec, w, 2.0 * a_star);
}

}  // namespace

double logpdf_gengamma_pearson7(const GenGammaPearsonParams& p, double s0,
                                const std::vector<Vector>& t) {
  p.validate();
  check_blocks(p.dims, t);
  if (!(s0 > 0.0)) return -kInf;
  double g = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    g += t[i].squaredNorm() / p.sigma_sq[i];
  }
  return gengamma_pearson_core(p, s0, g);
}

double logpdf_gengamma_pearson2(const GenGammaPearsonParams& p, double s0,
                                const std::vector<Vector>& r) {
  p.validate();
  check_blocks(p.dims, r);
  if (!(s0 > 0.0)) return -kInf;
  double g = 0.0;
  double jac = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double rho = r[i].squaredNorm();
    if (!(rho < 1.0)) return -kInf;
    g += rho / (1.0 - rho) / p.sigma_sq[i];
    jac -= (0.5 * p.dims[i] + 1.0) * std::log1p(-rho);
  }
  return gengamma_pearson_core(p, s0, g) + jac;
}

double logpdf_mv_gengamma(const ScaleShapeParams& p, const GeneratorSpec& spec,
                          const Vector& u) {
  p.validate();
  std::size_t k = p.shapes.size();
  if (static_cast<std::size_t>(u.size()) != k) {
    throw DimensionMismatch("expected " + std::to_string(k) + " coordinates");
  }
  double a_sum = 0.0;
  double v = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double a = p.shapes[i];
    if (!(u(i) > 0.0)) {
      throw NonPositiveInput("coordinate " + std::to_string(i) +
                             " must be > 0");
    }
    a_sum += a;
    v += a * kLogPi - a * std::log(p.scales[i]) - log_gamma(a) +
         (a - 1.0) * std::log(u(i));
    w += u(i) / p.scales[i];
  }
  return v + log_h(spec, w, 2.0 * a_sum);
}

void BetaParams::validate() const {
  shape.validate();
  if (betas.size() != shape.alphas.size()) {
    throw DimensionMismatch("need one beta per shape");
  }
  require_positive(betas, "beta");
}

double log_dirichlet_norm(const ExtendedShape& s) {
  double v = log_gamma(s.alpha0) - log_gamma(s.alpha_star());
  for (double a : s.alphas) v += log_gamma(a);
  return v;
}

double logpdf_mv_beta1(const BetaParams& p, const Vector& b) {
  p.validate();
  std::size_t k = p.shape.alphas.size();
  if (static_cast<std::size_t>(b.size()) != k) {
    throw DimensionMismatch("expected " + std::to_string(k) + " coordinates");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(b(i) > 0.0 && b(i) < 1.0)) return -kInf;
  }
  double a_star = p.shape.alpha_star();
  double v = -log_dirichlet_norm(p.shape);
  std::vector<double> rho(k);
  for (std::size_t i = 0; i < k; ++i) {
    double a = p.shape.alphas[i];
    rho[i] = b(i);
    v += -a * std::log(p.betas[i]) + (a - 1.0) * std::log(b(i)) +
         (a_star - a - 1.0) * std::log1p(-b(i));
  }
  return v - a_star * log_pearson2_bracket(rho, p.betas);
}

double logpdf_mv_beta2(const BetaParams& p, const Vector& f) {
  p.validate();
  std::size_t k = p.shape.alphas.size();
  if (static_cast<std::size_t>(f.size()) != k) {
    throw DimensionMismatch("expected " + std::to_string(k) + " coordinates");
  }
  double v = -log_dirichlet_norm(p.shape);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double a = p.shape.alphas[i];
    if (!(f(i) > 0.0)) {
      throw NonPositiveInput("coordinate " + std::to_string(i) +
                             " must be > 0");
    }
    v += -a * std::log(p.betas[i]) + (a - 1.0) * std::log(f(i));
    s += f(i) / p.betas[i];
  }
  return v - p.shape.alpha_star() * std::log1p(s);
}

void GenGammaBetaParams::validate() const {
  shape.validate();
  if (!finite_pos(sigma0_sq)) throw ParameterOutOfDomain("sigma0^2 must be > 0");
  if (sigma_sq.size() != shape.alphas.size()) {
    throw DimensionMismatch("need one sigma^2 per shape");
  }
  require_positive(sigma_sq, "sigma^2");
  check_generator(spec, 2.0 * shape.alpha_star());
}

BetaParams GenGammaBetaParams::beta_params() const {
  BetaParams b{shape, {}};
  for (double s : sigma_sq) b.betas.push_back(s / sigma0_sq);
  return b;
}

namespace {

// Shared by the beta I / II joint laws: g = sum sigma_i^-2 f_i.
double gengamma_beta_core(const GenGammaBetaParams& p, double s0, double g) {
  double a_star = p.shape.alpha_star();
  double c = a_star * kLogPi - p.shape.alpha0 * std::log(p.sigma0_sq) -
             log_gamma(p.shape.alpha0);
  for (std::size_t i = 0; i < p.shape.alphas.size(); ++i) {
    double a = p.shape.alphas[i];
    c -= a * std::log(p.sigma_sq[i]) + log_gamma(a);
  }
  double w = s0 / p.sigma0_sq * (1.0 + p.sigma0_sq * g);
  return c + (a_star - 1.0) * std::log(s0) + log_h(p.spec, w, 2.0 * a_star);
}

}  // namespace

double logpdf_gengamma_beta1(const GenGammaBetaParams& p, double s0,
                             const Vector& b) {
  p.validate();
  std::size_t k = p.shape.alphas.size();
  if (static_cast<std::size_t>(b.size()) != k) {
    throw DimensionMismatch("expected " + std::to_string(k) + " coordinates");
  }
  if (!(s0 > 0.0)) return -kInf;
  double g = 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(b(i) > 0.0 && b(i) < 1.0)) return -kInf;
    double a = p.shape.alphas[i];
    g += b(i) / (1.0 - b(i)) / p.sigma_sq[i];
    v += (a - 1.0) * std::log(b(i)) - (a + 1.0) * std::log1p(-b(i));
  }
  return v + gengamma_beta_core(p, s0, g);
}

double logpdf_gengamma_beta2(const GenGammaBetaParams& p, double s0,
                             const Vector& f) {
  p.validate();
  std::size_t k = p.shape.alphas.size();
  if (static_cast<std::size_t>(f.size()) != k) {
    throw DimensionMismatch("expected " + std::to_string(k) + " coordinates");
  }
  if (!(s0 > 0.0)) return -kInf;
  double g = 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(f(i) > 0.0)) return -kInf;
    g += f(i) / p.sigma_sq[i];
    v += (p.shape.alphas[i] - 1.0) * std::log(f(i));
  }
  return v + gengamma_beta_core(p, s0, g);
}

void GammaLogGammaParams::validate() const {
  if (alphas.size() != sigma_sq.size() || rhos.size() != delta_sq.size()) {
    throw DimensionMismatch("shapes and scales must have equal lengths");
  }
  if (alphas.empty() && rhos.empty()) {
    throw ParameterOutOfDomain("need at least one coordinate");
  }
  require_positive(alphas, "alpha");
  require_positive(sigma_sq, "sigma^2");
  require_positive(rhos, "rho");
  require_positive(delta_sq, "delta^2");
  double total = 0.0;
  for (double a : alphas) total += a;
  for (double r : rhos) total += r;
  check_generator(spec, 2.0 * total);
}

double logpdf_gamma_loggamma(const GammaLogGammaParams& p, const Vector& u,
                             const Vector& y) {
  p.validate();
  if (static_cast<std::size_t>(u.size()) != p.alphas.size() ||
      static_cast<std::size_t>(y.size()) != p.rhos.size()) {
    throw DimensionMismatch("coordinate counts do not match parameters");
  }
  double total = 0.0;
  double v = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < p.alphas.size(); ++i) {
    double a = p.alphas[i];
    if (!(u(i) > 0.0)) {
      throw NonPositiveInput("coordinate " + std::to_string(i) +
                             " must be > 0");
    }
    total += a;
    v += a * kLogPi - a * std::log(p.sigma_sq[i]) - log_gamma(a) +
         (a - 1.0) * std::log(u(i));
    w += u(i) / p.sigma_sq[i];
  }
  for (std::size_t j = 0; j < p.rhos.size(); ++j) {
    double r = p.rhos[j];
    if (!std::isfinite(y(j))) return -kInf;
    total += r;
    v += r * kLogPi - r * std::log(p.delta_sq[j]) - log_gamma(r) + r * y(j);
    w += std::exp(y(j)) / p.delta_sq[j];
  }
  return v + log_h(p.spec, w, 2.0 * total);
}

}  // namespace multivec
