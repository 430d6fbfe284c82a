// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_DENSITIES_HPP_
#define MULTIVEC_DENSITIES_HPP_

#include <vector>

#include "multivec/core.hpp"
#include "multivec/generators.hpp"

namespace multivec {

// All functions return log densities. Points outside the support give -inf;
// structurally invalid input (wrong lengths, bad parameters) throws.

//---------------------------------------------------------------------------
// Vector families with block-diagonal scale
//---------------------------------------------------------------------------

/// x = (x_1, ..., x_k) elliptical with block-diagonal scale
/// diag(Sigma_11, ..., Sigma_kk); the generator is normalized at the total
/// dimension n.
double logpdf_mv_elliptical(const MvEllipticalParams& p,
                            const GeneratorSpec& spec, const Vector& x);
double logpdf_mv_elliptical(const MvEllipticalParams& p,
                            const BlockFactors& f, const GeneratorSpec& spec,
                            const Vector& x);

/// log(v) is multivector elliptical; all v_j > 0.
double logpdf_mv_log_elliptical(const MvEllipticalParams& p,
                                const GeneratorSpec& spec, const Vector& v);

/// The first k1 blocks enter linearly (x), the remaining blocks through
/// their logarithms (v). x and v together cover the whole partition.
double logpdf_mixed_ell_logell(const MvEllipticalParams& p, int k1,
                               const GeneratorSpec& spec, const Vector& x,
                               const Vector& v);

//---------------------------------------------------------------------------
// t / Pearson II families
//---------------------------------------------------------------------------

/// Block dimensions n_1..n_k, auxiliary shape alpha0 (n0 / 2, any positive
/// real) and relative scales beta_i = sigma_i^2 / sigma_0^2.
struct MvTParams {
  std::vector<int> dims;
  double alpha0 = 1.0;
  std::vector<double> betas;

  static MvTParams from_partition(const Partition& p,
                                  std::vector<double> betas);
  double alpha_star() const;
  void validate() const;
};

double logpdf_mv_t(const MvTParams& p, const std::vector<Vector>& t);

/// Image of the t law under r_i = t_i / sqrt(1 + |t_i|^2); support |r_i| < 1.
double logpdf_mv_pearson2(const MvTParams& p, const std::vector<Vector>& r);

/// Joint law of s0 = |x_0|^2 and t_i = x_i / |x_0| for a multivector
/// elliptical (x_0, x_1, ..., x_k) with scales sigma_i^2 I and generator
/// spec (normalized at dimension 2 alpha0 + sum n_i). k = 0 is allowed and
/// gives the generalised chi-square law of s0.
struct GenGammaPearsonParams {
  std::vector<int> dims;
  double alpha0 = 1.0;
  double sigma0_sq = 1.0;
  std::vector<double> sigma_sq;
  GeneratorSpec spec;

  double alpha_star() const;
  void validate() const;
};

double logpdf_gengamma_pearson7(const GenGammaPearsonParams& p, double s0,
                                const std::vector<Vector>& t);

/// As above with t_i replaced by r_i = t_i / sqrt(1 + |t_i|^2).
double logpdf_gengamma_pearson2(const GenGammaPearsonParams& p, double s0,
                                const std::vector<Vector>& r);

//---------------------------------------------------------------------------
// Scalar families with real shapes
//---------------------------------------------------------------------------

/// u_i = |x_i|^2 with shapes alpha_i (n_i / 2) and scales sigma_i^2
/// (p.scales); the generator is normalized at 2 sum alpha_i.
double logpdf_mv_gengamma(const ScaleShapeParams& p, const GeneratorSpec& spec,
                          const Vector& u);

/// Shapes alpha_0 (p.shape.alpha0), alpha_1..alpha_k and scales beta_i.
struct BetaParams {
  ExtendedShape shape;
  std::vector<double> betas;

  void validate() const;
};

/// log of prod_{i=0..k} Gamma(alpha_i) / Gamma(alpha*).
double log_dirichlet_norm(const ExtendedShape& s);

/// Multivariate beta type I on (0, 1)^k.
double logpdf_mv_beta1(const BetaParams& p, const Vector& b);

/// Multivariate beta type II (multivariate F) on (0, inf)^k.
double logpdf_mv_beta2(const BetaParams& p, const Vector& f);

/// Joint law of s0 and the beta type I / II coordinates, with shapes
/// alpha_0..alpha_k, scales sigma_0^2..sigma_k^2 and generator spec
/// normalized at 2 alpha*.
struct GenGammaBetaParams {
  ExtendedShape shape;
  double sigma0_sq = 1.0;
  std::vector<double> sigma_sq;
  GeneratorSpec spec;

  void validate() const;
  /// beta_i = sigma_i^2 / sigma_0^2.
  BetaParams beta_params() const;
};

double logpdf_gengamma_beta1(const GenGammaBetaParams& p, double s0,
                             const Vector& b);
double logpdf_gengamma_beta2(const GenGammaBetaParams& p, double s0,
                             const Vector& f);

/// k1 gamma-type coordinates u_i (shapes alpha_i, scales sigma_i^2) and k2
/// log-gamma coordinates y_j (shapes rho_j, scales delta_j^2).
struct GammaLogGammaParams {
  std::vector<double> alphas;
  std::vector<double> sigma_sq;
  std::vector<double> rhos;
  std::vector<double> delta_sq;
  GeneratorSpec spec;

  void validate() const;
};

double logpdf_gamma_loggamma(const GammaLogGammaParams& p, const Vector& u,
                             const Vector& y);

}  // namespace multivec

#endif  // MULTIVEC_DENSITIES_HPP_
