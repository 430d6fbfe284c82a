// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/special.hpp"

#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "multivec/errors.hpp"

namespace multivec {

double log_gamma(double x) {
  if (!(x > 0.0)) throw ParameterOutOfDomain("log_gamma needs x > 0");
  if (std::isinf(x)) return x;
  return boost::math::lgamma(x);
}

double xlogy(double x, double y) {
  if (x == 0.0 && !std::isnan(y)) return 0.0;
  return x * std::log(y);
}

namespace {

// Taylor coefficients of 1 / Gamma(1 + x) about x = 0.
constexpr std::array<double, 29> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

// For |mu| <= 1/2: gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu),
// gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2, gampl = 1/G(1+mu), gammi = 1/G(1-mu).
void temme_gammas(double mu, double* gam1, double* gam2, double* gampl,
                  double* gammi) {
  double odd = 0.0;
  double even = 0.0;
  double mu2 = mu * mu;
  for (int i = static_cast<int>(kRecipGamma.size()) - 1; i >= 0; --i) {
    if (i % 2 == 1) {
      odd = odd * mu2 + kRecipGamma[i];
    } else {
      even = even * mu2 + kRecipGamma[i];
    }
  }
  // odd now holds sum_{i odd} c_i mu^(i-1); even holds sum_{i even} c_i mu^i.
  *gam1 = -odd;
  *gam2 = even;
  *gampl = even + mu * odd;
  *gammi = even - mu * odd;
}

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

}  // namespace

double log_bessel_k_unchecked(double q, double z) {
  if (!(z > 0.0) || std::isnan(q)) {
    throw ParameterOutOfDomain("log_bessel_k needs z > 0");
  }
  if (std::isinf(z)) return -std::numeric_limits<double>::infinity();
  double nu = std::abs(q);
  int nl = static_cast<int>(nu + 0.5);
  double mu = nu - nl;
  double mu2 = mu * mu;
  double xi = 1.0 / z;
  double xi2 = 2.0 * xi;
  double log_kmu;
  double ratio;  // K_{mu+1}(z) / K_mu(z)
  constexpr double pi = std::numbers::pi;
  if (z < 2.0) {
    double x2 = 0.5 * z;
    double pimu = pi * mu;
    double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, &gam1, &gam2, &gampl, &gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double qq = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
      ff = (i * ff + p + qq) / (i * static_cast<double>(i) - mu2);
      c *= d / i;
      p /= i - mu;
      qq /= i + mu;
      double del = c * ff;
      sum += del;
      double del1 = c * (p - i * ff);
      sum1 += del1;
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    log_kmu = std::log(sum);
    ratio = sum1 * xi2 / sum;
  } else {
    // Steed's continued fraction, evaluated with the e^{-z} factor kept
    // separate so that large z does not underflow.
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double a1 = 0.25 - mu2;
    double qs = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + qs * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      qs += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      double dels = qs * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    log_kmu = 0.5 * std::log(pi / (2.0 * z)) - z - std::log(s);
    ratio = (mu + z + 0.5 - h) * xi;
  }
  // Upward recurrence K_{m+1} = (2m/z) K_m + K_{m-1}, carried as ratios.
  double log_k = log_kmu;
  for (int i = 1; i <= nl; ++i) {
    log_k += std::log(ratio);
    ratio = (mu + i) * xi2 + 1.0 / ratio;
  }
  return log_k;
}

double log_bessel_k(double q, double z) {
  if (!(z >= 1e-6 && z <= 700.0)) {
    throw Overflow("log_bessel_k argument outside [1e-6, 700]");
  }
  return log_bessel_k_unchecked(q, z);
}

}  // namespace multivec
