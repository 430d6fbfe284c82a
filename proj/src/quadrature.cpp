// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "multivec/errors.hpp"

namespace multivec {

namespace {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::tanh_sinh;

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isfinite(v) ? v : 0.0; }

void check_result(double value, double err) {
  if (!std::isfinite(value) || !std::isfinite(err)) {
    throw QuadratureFailure("quadrature did not produce a finite estimate");
  }
}

double finite_piece(const std::function<double(double)>& f, double a,
                    double b, double tol) {
  if (!(b > a)) return 0.0;
  thread_local tanh_sinh<double> ts(12);
  double err = 0.0;
  double l1 = 0.0;
  double v;
  try {
    v = ts.integrate([&](double x) { return sanitize(f(x)); }, a, b, tol,
                     &err, &l1);
  } catch (const std::exception& e) {
    throw QuadratureFailure(std::string("tanh-sinh failed: ") + e.what());
  }
  check_result(v, err);
  return v;
}

double tail_piece(const std::function<double(double)>& f, double a,
                  double tol) {
  thread_local exp_sinh<double> es(9);
  double err = 0.0;
  double l1 = 0.0;
  double v;
  try {
    v = es.integrate([&](double x) { return sanitize(f(x)); }, a, kInf, tol,
                     &err, &l1);
  } catch (const std::exception& e) {
    throw QuadratureFailure(std::string("exp-sinh failed: ") + e.what());
  }
  check_result(v, err);
  return v;
}

// Integral over [lo, inf).
double upper_half(const std::function<double(double)>& f, double lo,
                  double center, double scale, std::vector<double> breaks,
                  double tol) {
  if (breaks.empty() && center <= lo) {
    return scale * tail_piece([&](double t) { return f(lo + scale * t); },
                              0.0, tol);
  }
  double start = std::max(lo, center);
  if (start > lo) breaks.push_back(start);
  double tail_at = start + scale;
  for (double b : breaks) tail_at = std::max(tail_at, b + scale);
  breaks.push_back(tail_at);
  std::vector<double> pts{lo};
  std::sort(breaks.begin(), breaks.end());
  for (double b : breaks) {
    if (b > pts.back()) pts.push_back(b);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += finite_piece(f, pts[i], pts[i + 1], tol);
  }
  total += tail_piece(f, pts.back(), tol);
  return total;
}

}  // namespace

Range finite_range(double lo, double hi) {
  Range r;
  r.lo = lo;
  r.hi = hi;
  r.center = 0.5 * (lo + hi);
  r.scale = hi - lo;
  return r;
}

Range half_line(double lo, double scale) {
  Range r;
  r.lo = lo;
  r.hi = kInf;
  r.center = lo;
  r.scale = scale;
  return r;
}

Range real_line(double center, double scale) {
  Range r;
  r.lo = -kInf;
  r.hi = kInf;
  r.center = center;
  r.scale = scale;
  return r;
}

double integrate(const std::function<double(double)>& f, const Range& r,
                 double tol) {
  if (!(r.scale > 0.0)) throw PreconditionError("range scale must be > 0");
  bool lo_inf = std::isinf(r.lo);
  bool hi_inf = std::isinf(r.hi);
  if (!lo_inf && !hi_inf) {
    std::vector<double> pts{r.lo};
    std::vector<double> br = r.breaks;
    std::sort(br.begin(), br.end());
    for (double b : br) {
      if (b > pts.back() && b < r.hi) pts.push_back(b);
    }
    pts.push_back(r.hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      total += finite_piece(f, pts[i], pts[i + 1], tol);
    }
    return total;
  }
  auto mirrored = [&f](double x) { return f(-x); };
  std::vector<double> neg_breaks;
  for (double b : r.breaks) neg_breaks.push_back(-b);
  if (!lo_inf) {
    return upper_half(f, r.lo, r.center, r.scale, r.breaks, tol);
  }
  if (!hi_inf) {
    return upper_half(mirrored, -r.hi, -r.center, r.scale, neg_breaks, tol);
  }
  std::vector<double> up;
  std::vector<double> down;
  for (double b : r.breaks) {
    if (b > r.center) up.push_back(b);
    if (b < r.center) down.push_back(-b);
  }
  return upper_half(f, r.center, r.center, r.scale, up, tol) +
         upper_half(mirrored, -r.center, -r.center, r.scale, down, tol);
}

namespace {

double nested(const std::function<double(const Vector&)>& f,
              const std::vector<Range>& ranges, Vector& x, int level,
              double tol) {
  auto g = [&](double t) {
    x(level) = t;
    if (level + 1 == static_cast<int>(ranges.size())) return f(x);
    return nested(f, ranges, x, level + 1, tol);
  };
  return integrate(g, ranges[level], tol);
}

}  // namespace

double integrate_nd(const std::function<double(const Vector&)>& f,
                    const std::vector<Range>& ranges, double tol) {
  if (ranges.empty() || ranges.size() > 3) {
    throw PreconditionError("nested quadrature supports 1 to 3 dimensions");
  }
  Vector x = Vector::Zero(static_cast<Eigen::Index>(ranges.size()));
  return nested(f, ranges, x, 0, tol);
}

}  // namespace multivec
