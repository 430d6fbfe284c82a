// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_SAMPLING_HPP_
#define MULTIVEC_SAMPLING_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "multivec/core.hpp"
#include "multivec/densities.hpp"
#include "multivec/generators.hpp"

namespace multivec {

/// SplitMix64 (Steele, Lea and Flood 2014): a Weyl sequence with increment
/// 0x9E3779B97F4A7C15 passed through a fixed 64-bit finalizer. The stream
/// depends only on the seed, so results are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Independent stream number `index` derived from `seed`. Parallel
  /// sampling gives chunk j of a batch the stream substream(seed, j).
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform();
  /// Standard normal via the Box-Muller transform; the second variate of
  /// each pair is cached.
  double normal();
  /// log of a Gamma(shape, 1) variate. Working in logs keeps tiny shapes
  /// from underflowing to zero.
  double log_gamma_variate(double shape);
  double gamma(double shape);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixing function used by the generator; exposed for stream splitting.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Log of a Dirichlet(shapes) draw (components sum to one).
std::vector<double> sample_log_dirichlet(const std::vector<double>& shapes,
                                         Rng& rng);

/// Uniform direction on the unit sphere in R^n.
Vector sample_unit_sphere(int n, Rng& rng);

/// Draws |x| for spherical x with the given generator. Kotz, Pearson VII and
/// Pearson II use exact transformations of gamma/beta variates. Other
/// kernels (Bessel) use inverse-CDF sampling on an adaptive grid of cubic
/// Hermite pieces that reproduces the CDF to about 1e-10.
class RadialSampler {
 public:
  explicit RadialSampler(const RadialLaw& law, bool force_numeric = false);

  /// Shared cached instance; safe to call from several threads.
  static std::shared_ptr<const RadialSampler> get(const RadialLaw& law);

  double draw(Rng& rng) const;
  /// log of the squared radius.
  double draw_log_sq(Rng& rng) const;
  bool numeric() const { return !knots_.empty(); }
  /// CDF of the numeric table at x (numeric samplers only).
  double table_cdf(double x) const;

 private:
  struct Knot {
    double x;
    double cdf;
    double pdf;
  };
  void build_table();
  double invert(double u) const;

  RadialLaw law_;
  std::vector<Knot> knots_;
  double total_ = 1.0;
};

double sample_radius(const RadialLaw& law, Rng& rng);

Vector sample_mv_elliptical(const MvEllipticalParams& p,
                            const GeneratorSpec& spec, Rng& rng);
/// Componentwise exp of an elliptical draw.
Vector sample_mv_log_elliptical(const MvEllipticalParams& p,
                                const GeneratorSpec& spec, Rng& rng);
/// (x, v): linear part of the first k1 blocks and exp of the rest.
std::pair<Vector, Vector> sample_mixed_ell_logell(const MvEllipticalParams& p,
                                                  int k1,
                                                  const GeneratorSpec& spec,
                                                  Rng& rng);

std::vector<Vector> sample_mv_t(const MvTParams& p, Rng& rng);
std::vector<Vector> sample_mv_pearson2(const MvTParams& p, Rng& rng);

struct JointDraw {
  double s0 = 0.0;
  std::vector<Vector> blocks;
};

JointDraw sample_gengamma_pearson7(const GenGammaPearsonParams& p, Rng& rng);
JointDraw sample_gengamma_pearson2(const GenGammaPearsonParams& p, Rng& rng);

Vector sample_mv_gengamma(const ScaleShapeParams& p, const GeneratorSpec& spec,
                          Rng& rng);
Vector sample_mv_beta1(const BetaParams& p, Rng& rng);
Vector sample_mv_beta2(const BetaParams& p, Rng& rng);
std::pair<double, Vector> sample_gengamma_beta1(const GenGammaBetaParams& p,
                                                Rng& rng);
std::pair<double, Vector> sample_gengamma_beta2(const GenGammaBetaParams& p,
                                                Rng& rng);
std::pair<Vector, Vector> sample_gamma_loggamma(const GammaLogGammaParams& p,
                                                Rng& rng);

/// Number of worker threads: MULTIVEC_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
int configured_threads();

/// n rows drawn by `row`. Rows are produced in chunks of kSampleChunk; chunk
/// j uses Rng::substream(seed, j), so the result does not depend on the
/// number of threads.
inline constexpr std::int64_t kSampleChunk = 4096;
Matrix sample_rows(std::int64_t n, int cols, std::uint64_t seed,
                   const std::function<void(Rng&, double*)>& row,
                   int threads = 0);

}  // namespace multivec

#endif  // MULTIVEC_SAMPLING_HPP_
