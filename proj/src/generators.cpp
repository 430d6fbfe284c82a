// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/generators.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "multivec/errors.hpp"
#include "multivec/quadrature.hpp"
#include "multivec/special.hpp"

namespace multivec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogPi = std::log(std::numbers::pi);

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

GeneratorSpec GeneratorSpec::kotz(double r, double q, double s) {
  return {GeneratorKind::Kotz, r, q, s};
}

GeneratorSpec GeneratorSpec::pearson7(double r, double q) {
  return {GeneratorKind::PearsonVII, r, q, 1.0};
}

GeneratorSpec GeneratorSpec::pearson2(double q) {
  return {GeneratorKind::PearsonII, 1.0, q, 1.0};
}

GeneratorSpec GeneratorSpec::bessel(double r, double q) {
  return {GeneratorKind::Bessel, r, q, 1.0};
}

std::string GeneratorSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case GeneratorKind::Kotz:
      os << "Kotz(r=" << r << ", q=" << q << ", s=" << s << ")";
      break;
    case GeneratorKind::PearsonVII:
      os << "PearsonVII(r=" << r << ", q=" << q << ")";
      break;
    case GeneratorKind::PearsonII:
      os << "PearsonII(q=" << q << ")";
      break;
    case GeneratorKind::Bessel:
      os << "Bessel(r=" << r << ", q=" << q << ")";
      break;
  }
  return os.str();
}

void check_generator(const GeneratorSpec& g, double n) {
  if (!finite_pos(n)) throw ParameterOutOfDomain("dimension must be > 0");
  if (!std::isfinite(g.q)) throw ParameterOutOfDomain("q must be finite");
  switch (g.kind) {
    case GeneratorKind::Kotz:
      if (!finite_pos(g.r) || !finite_pos(g.s)) {
        throw ParameterOutOfDomain("Kotz needs r > 0 and s > 0");
      }
      if (!(2.0 * g.q + n > 2.0)) {
        throw ParameterOutOfDomain("Kotz needs 2q + n > 2");
      }
      break;
    case GeneratorKind::PearsonVII:
      if (!finite_pos(g.r)) throw ParameterOutOfDomain("PearsonVII needs r > 0");
      if (!(g.q > 0.5 * n)) {
        throw ParameterOutOfDomain("PearsonVII needs q > n/2");
      }
      break;
    case GeneratorKind::PearsonII:
      if (!(g.q > -1.0)) throw ParameterOutOfDomain("PearsonII needs q > -1");
      break;
    case GeneratorKind::Bessel:
      if (!finite_pos(g.r)) throw ParameterOutOfDomain("Bessel needs r > 0");
      if (!(g.q > -0.5 * n)) {
        throw ParameterOutOfDomain("Bessel needs q > -n/2");
      }
      if (!(std::abs(g.q) < n + 1.0)) {
        throw ParameterOutOfDomain("Bessel kernel needs |q| < n + 1");
      }
      break;
  }
}

double log_norm_const(const GeneratorSpec& g, double n) {
  check_generator(g, n);
  double half_n = 0.5 * n;
  switch (g.kind) {
    case GeneratorKind::Kotz: {
      double e = (2.0 * g.q + n - 2.0) / (2.0 * g.s);
      return std::log(g.s) + e * std::log(g.r) + log_gamma(half_n) -
             half_n * kLogPi - log_gamma(e);
    }
    case GeneratorKind::PearsonVII:
      return log_gamma(g.q) - half_n * (std::log(g.r) + kLogPi) -
             log_gamma(g.q - half_n);
    case GeneratorKind::PearsonII:
      return log_gamma(g.q + 1.0 + half_n) - half_n * kLogPi -
             log_gamma(g.q + 1.0);
    case GeneratorKind::Bessel:
      return log_gamma(half_n) - half_n * kLogPi - n * std::log(2.0) -
             (n + 1.0) * std::log(g.r) - log_gamma(0.5 * (n + 1.0 - g.q)) -
             log_gamma(0.5 * (n + 1.0 + g.q));
  }
  return 0.0;
}

double bessel_alternate_log_norm_const(double r, double q, double n) {
  return -((q + n - 1.0) * std::log(2.0) + 0.5 * n * kLogPi +
           (n + q) * std::log(r) + log_gamma(q + 0.5 * n));
}

double log_kernel(const GeneratorSpec& g, double w) {
  if (std::isnan(w) || w < 0.0) {
    throw PreconditionError("kernel argument must be >= 0");
  }
  switch (g.kind) {
    case GeneratorKind::Kotz:
      if (std::isinf(w)) return -kInf;
      return xlogy(g.q - 1.0, w) - std::exp(std::log(g.r) + g.s * std::log(w));
    case GeneratorKind::PearsonVII:
      return -g.q * std::log1p(w / g.r);
    case GeneratorKind::PearsonII:
      if (w > 1.0) return -kInf;
      return xlogy(g.q, 1.0 - w);
    case GeneratorKind::Bessel: {
      if (std::isinf(w)) return -kInf;
      if (w == 0.0) {
        double a = std::abs(g.q);
        if (a < 1.0) return -kInf;
        if (a == 1.0) return std::log(g.r);
        return kInf;
      }
      double z = std::sqrt(w) / g.r;
      return 0.5 * std::log(w) + log_bessel_k_unchecked(g.q, z);
    }
  }
  return 0.0;
}

double log_h(const GeneratorSpec& g, double w, double n) {
  return log_norm_const(g, n) + log_kernel(g, w);
}

double radial_logpdf(const RadialLaw& law, double radius) {
  if (!(radius > 0.0)) throw ParameterOutOfDomain("radius must be > 0");
  double n = law.n;
  return std::log(2.0) + 0.5 * n * kLogPi - log_gamma(0.5 * n) +
         (n - 1.0) * std::log(radius) + log_h(law.spec, radius * radius, n);
}

double radial_integral_identity_check(const GeneratorSpec& g, double n,
                                      double a) {
  if (!finite_pos(a)) throw ParameterOutOfDomain("a must be > 0");
  double lc = log_norm_const(g, n);
  double half_n = 0.5 * n;
  double log_rhs = half_n * std::log(a) + log_gamma(half_n) - half_n * kLogPi;
  // Integrate the ratio LHS/RHS directly to avoid scale issues.
  auto f = [&](double z) {
    if (!(z > 0.0)) return 0.0;
    double lk = log_kernel(g, z / a);
    if (lk == -kInf) return 0.0;
    return std::exp((half_n - 1.0) * std::log(z) + lc + lk - log_rhs);
  };
  double val;
  if (g.kind == GeneratorKind::PearsonII) {
    val = integrate(f, finite_range(0.0, a), 1e-12);
  } else {
    Range r = half_line(0.0, a * std::max(1.0, n));
    val = integrate(f, r, 1e-12);
  }
  return std::abs(val - 1.0);
}

}  // namespace multivec
