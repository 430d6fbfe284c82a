// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_SPECIAL_HPP_
#define MULTIVEC_SPECIAL_HPP_

namespace multivec {

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// x * log(y) with the convention 0 * log(0) = 0.
double xlogy(double x, double y);

/// log K_q(z), the modified Bessel function of the second kind.
/// Accurate to about 1e-10 relative for z in [1e-6, 700] and |q| <= 50;
/// throws Overflow for z outside that interval.
double log_bessel_k(double q, double z);

/// Same as log_bessel_k without the range check; valid for any z > 0.
double log_bessel_k_unchecked(double q, double z);

}  // namespace multivec

#endif  // MULTIVEC_SPECIAL_HPP_
