// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_QUADRATURE_HPP_
#define MULTIVEC_QUADRATURE_HPP_

#include <functional>
#include <vector>

#include "multivec/core.hpp"

namespace multivec {

/// An integration range; lo and hi may be infinite. For unbounded sides the
/// range is split at `center` and at `center +/- scale` before the tail
/// transform is applied, so scale should be of the order of the
/// integrand's width. `breaks` are extra interior split points.
struct Range {
  double lo = 0.0;
  double hi = 1.0;
  double center = 0.0;
  double scale = 1.0;
  std::vector<double> breaks;
};

Range finite_range(double lo, double hi);
Range half_line(double lo, double scale);
Range real_line(double center, double scale);

/// Adaptive double-exponential quadrature of f over r. Non-finite
/// integrand values are treated as zero (they only arise at integrable
/// endpoint singularities). Throws QuadratureFailure when the estimate or
/// its error bound is not finite.
double integrate(const std::function<double(double)>& f, const Range& r,
                 double tol = 1e-10);

/// Nested quadrature over a product of ranges (at most three).
double integrate_nd(const std::function<double(const Vector&)>& f,
                    const std::vector<Range>& ranges, double tol = 1e-9);

}  // namespace multivec

#endif  // MULTIVEC_QUADRATURE_HPP_
