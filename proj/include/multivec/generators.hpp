// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_GENERATORS_HPP_
#define MULTIVEC_GENERATORS_HPP_

#include <string>

namespace multivec {

enum class GeneratorKind { Kotz, PearsonVII, PearsonII, Bessel };

/// Elliptical generator h(W) = C_n * kernel(W).
///
/// Kernels:
///   Kotz(r, q, s):     W^(q-1) exp(-r W^s)
///   PearsonVII(r, q):  (1 + W / r)^(-q)
///   PearsonII(q):      (1 - W)^q on W <= 1
///   Bessel(r, q):      W^(1/2) K_q(W^(1/2) / r)
/// Unused fields are ignored.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Kotz;
  double r = 0.5;
  double q = 1.0;
  double s = 1.0;

  static GeneratorSpec kotz(double r, double q, double s);
  static GeneratorSpec pearson7(double r, double q);
  static GeneratorSpec pearson2(double q);
  static GeneratorSpec bessel(double r, double q);
  /// Kotz(1/2, 1, 1), the normal generator.
  static GeneratorSpec gaussian() { return kotz(0.5, 1.0, 1.0); }

  std::string describe() const;
};

/// Throws ParameterOutOfDomain unless the generator is a valid,
/// normalizable kernel in (real) dimension n.
void check_generator(const GeneratorSpec& spec, double n);

/// log C_n such that the integral over R^n of C_n kernel(|x|^2) is one.
double log_norm_const(const GeneratorSpec& spec, double n);

/// Log of the unnormalized kernel; -inf outside the support.
double log_kernel(const GeneratorSpec& spec, double w);

/// log h(w) = log_norm_const(spec, n) + log_kernel(spec, w).
double log_h(const GeneratorSpec& spec, double w, double n);

/// The Bessel constant in the form 1 / (2^(q+n-1) pi^(n/2) r^(n+q)
/// Gamma(q + n/2)), which normalizes W^(q/2) K_q rather than the
/// W^(1/2) K_q kernel above. Kept so tests can show the mismatch.
double bessel_alternate_log_norm_const(double r, double q, double n);

/// Law of |x| for a spherical x in dimension n with generator spec.
struct RadialLaw {
  GeneratorSpec spec;
  double n = 1.0;
};

double radial_logpdf(const RadialLaw& law, double radius);

/// Relative residual |I - R| / R of the identity
///   int_0^inf z^(n/2-1) h(z/a) dz = a^(n/2) Gamma(n/2) / pi^(n/2),
/// with the left side computed by quadrature.
double radial_integral_identity_check(const GeneratorSpec& spec, double n,
                                      double a);

}  // namespace multivec

#endif  // MULTIVEC_GENERATORS_HPP_
