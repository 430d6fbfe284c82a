// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

#include "multivec/errors.hpp"
#include "multivec/quadrature.hpp"

namespace multivec {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double m = *std::max_element(xs.begin(), xs.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log(e^a / (1 + e^a)) style helpers for b = f / (1 + f) given log f.
double ratio_to_unit(double log_f) { return 1.0 / (1.0 + std::exp(-log_f)); }

}  // namespace

//---------------------------------------------------------------------------
// Rng
//---------------------------------------------------------------------------

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64_mix(seed ^ splitmix64_mix(index + 0x632BE59BD9B4E019ULL)));
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return splitmix64_mix(state_);
}

double Rng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterOutOfDomain("gamma shape must be positive");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a).
    double boost = std::log(uniform()) / shape;
    return log_gamma_variate(shape + 1.0) + boost;
  }
  // Marsaglia and Tsang (2000).
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d) + std::log(v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

std::vector<double> sample_log_dirichlet(const std::vector<double>& shapes,
                                         Rng& rng) {
  std::vector<double> lg(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    lg[i] = rng.log_gamma_variate(shapes[i]);
  }
  double lse = log_sum_exp(lg);
  for (double& x : lg) x -= lse;
  return lg;
}

Vector sample_unit_sphere(int n, Rng& rng) {
  if (n < 1) throw ParameterOutOfDomain("sphere dimension must be >= 1");
  Vector g(n);
  for (;;) {
    for (int i = 0; i < n; ++i) g(i) = rng.normal();
    double norm = g.norm();
    if (norm > 0.0) return g / norm;
  }
}

//---------------------------------------------------------------------------
// Radial sampling
//---------------------------------------------------------------------------

RadialSampler::RadialSampler(const RadialLaw& law, bool force_numeric)
    : law_(law) {
  check_generator(law.spec, law.n);
  if (force_numeric || law.spec.kind == GeneratorKind::Bessel) build_table();
}

std::shared_ptr<const RadialSampler> RadialSampler::get(const RadialLaw& law) {
  using Key = std::tuple<int, double, double, double, double>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const RadialSampler>> cache;
  Key key{static_cast<int>(law.spec.kind), law.spec.r, law.spec.q, law.spec.s,
          law.n};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto s = std::make_shared<const RadialSampler>(law);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, s).first->second;
}

namespace {

constexpr double kTailMass = 1e-13;
constexpr double kHermiteTol = 1e-11;

double hermite(double t, double h, double fa, double pa, double fb, double pb) {
  double t2 = t * t;
  double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * fa + (t3 - 2 * t2 + t) * h * pa +
         (-2 * t3 + 3 * t2) * fb + (t3 - t2) * h * pb;
}

double hermite_dt(double t, double h, double fa, double pa, double fb,
                  double pb) {
  double t2 = t * t;
  return (6 * t2 - 6 * t) * fa + (3 * t2 - 4 * t + 1) * h * pa +
         (-6 * t2 + 6 * t) * fb + (3 * t2 - 2 * t) * h * pb;
}

}  // namespace

void RadialSampler::build_table() {
  auto pdf = [this](double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp(radial_logpdf(law_, x));
  };
  bool bounded = law_.spec.kind == GeneratorKind::PearsonII;
  double hi = 1.0;
  if (!bounded) {
    for (int i = 0; i < 200; ++i) {
      double tail = integrate(pdf, half_line(hi, hi), 1e-12);
      if (tail < kTailMass) break;
      hi *= 2.0;
    }
  }
  double lo = 0.5 * hi;
  double lo_mass = 1.0;
  for (int i = 0; i < 2000; ++i) {
    lo_mass = integrate(pdf, finite_range(0.0, lo), 1e-12);
    if (lo_mass < kTailMass) break;
    lo *= 0.5;
  }
  // Initial geometric grid, then bisect wherever the cubic Hermite CDF
  // misses the quadrature CDF at the midpoint.
  const int n0 = 64;
  std::vector<double> xs(n0 + 1);
  for (int i = 0; i <= n0; ++i) {
    xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / n0);
  }
  xs.back() = hi;
  knots_.clear();
  knots_.push_back({lo, lo_mass, pdf(lo)});
  struct Pending {
    double a;
    double b;
    int depth;
  };
  for (int i = 0; i < n0; ++i) {
    std::vector<Pending> stack{{xs[i], xs[i + 1], 0}};
    while (!stack.empty()) {
      Pending iv = stack.back();
      stack.pop_back();
      const Knot& ka = knots_.back();
      double m = 0.5 * (iv.a + iv.b);
      double m1 = integrate(pdf, finite_range(iv.a, m), 1e-13);
      double m2 = integrate(pdf, finite_range(m, iv.b), 1e-13);
      double fb = ka.cdf + m1 + m2;
      double pb = pdf(iv.b);
      double h = iv.b - iv.a;
      double pred = hermite(0.5, h, ka.cdf, ka.pdf, fb, pb);
      if (std::abs(pred - (ka.cdf + m1)) > kHermiteTol && iv.depth < 40) {
        // Process the left half first; the stack is LIFO.
        stack.push_back({m, iv.b, iv.depth + 1});
        stack.push_back({iv.a, m, iv.depth + 1});
        continue;
      }
      knots_.push_back({iv.b, fb, pb});
    }
  }
  total_ = knots_.back().cdf + (bounded ? 0.0 : integrate(pdf, half_line(hi, hi), 1e-12));
}

double RadialSampler::table_cdf(double x) const {
  if (knots_.empty()) throw PreconditionError("sampler has no numeric table");
  if (x <= knots_.front().x) {
    return x <= 0.0 ? 0.0 : knots_.front().cdf * x / knots_.front().x / total_;
  }
  if (x >= knots_.back().x) return knots_.back().cdf / total_;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const Knot& k) { return v < k.x; });
  const Knot& b = *it;
  const Knot& a = *(it - 1);
  double h = b.x - a.x;
  return hermite((x - a.x) / h, h, a.cdf, a.pdf, b.cdf, b.pdf) / total_;
}

double RadialSampler::invert(double u) const {
  double target = u * total_;
  const Knot& first = knots_.front();
  if (target <= first.cdf) return first.x * target / first.cdf;
  if (target >= knots_.back().cdf) return knots_.back().x;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), target,
                             [](double v, const Knot& k) { return v < k.cdf; });
  const Knot& b = *it;
  const Knot& a = *(it - 1);
  double h = b.x - a.x;
  double tl = 0.0;
  double th = 1.0;
  double t = (target - a.cdf) / (b.cdf - a.cdf);
  for (int iter = 0; iter < 60; ++iter) {
    double f = hermite(t, h, a.cdf, a.pdf, b.cdf, b.pdf) - target;
    if (f > 0.0) {
      th = t;
    } else {
      tl = t;
    }
    double d = hermite_dt(t, h, a.cdf, a.pdf, b.cdf, b.pdf);
    double tn = d > 0.0 ? t - f / d : 0.5 * (tl + th);
    if (!(tn > tl && tn < th)) tn = 0.5 * (tl + th);
    if (std::abs(tn - t) < 1e-15) {
      t = tn;
      break;
    }
    t = tn;
  }
  return a.x + t * h;
}

double RadialSampler::draw_log_sq(Rng& rng) const {
  if (!knots_.empty()) return 2.0 * std::log(invert(rng.uniform()));
  const GeneratorSpec& g = law_.spec;
  double half_n = 0.5 * law_.n;
  switch (g.kind) {
    case GeneratorKind::Kotz: {
      double y = rng.log_gamma_variate((2.0 * g.q + law_.n - 2.0) / (2.0 * g.s));
      return (y - std::log(g.r)) / g.s;
    }
    case GeneratorKind::PearsonVII:
      return std::log(g.r) + rng.log_gamma_variate(half_n) -
             rng.log_gamma_variate(g.q - half_n);
    case GeneratorKind::PearsonII: {
      double a = rng.log_gamma_variate(half_n);
      double b = rng.log_gamma_variate(g.q + 1.0);
      return a - log_sum_exp({a, b});
    }
    case GeneratorKind::Bessel:
      break;
  }
  throw PreconditionError("radial sampler without a sampling path");
}

double RadialSampler::draw(Rng& rng) const {
  return std::exp(0.5 * draw_log_sq(rng));
}

double sample_radius(const RadialLaw& law, Rng& rng) {
  return RadialSampler::get(law)->draw(rng);
}

//---------------------------------------------------------------------------
// Elliptical families
//---------------------------------------------------------------------------

Vector sample_mv_elliptical(const MvEllipticalParams& p,
                            const GeneratorSpec& spec, Rng& rng) {
  p.validate();
  int n = p.partition.total();
  double rho = sample_radius({spec, static_cast<double>(n)}, rng);
  Vector z = rho * sample_unit_sphere(n, rng);
  Vector x(n);
  Eigen::Index off = 0;
  for (int i = 0; i < p.partition.k(); ++i) {
    int d = p.partition.dims[i];
    SpdFactor f(p.sigmas[i]);
    x.segment(off, d) = p.mus[i] + f.lower() * z.segment(off, d);
    off += d;
  }
  return x;
}

Vector sample_mv_log_elliptical(const MvEllipticalParams& p,
                                const GeneratorSpec& spec, Rng& rng) {
  return sample_mv_elliptical(p, spec, rng).array().exp();
}

std::pair<Vector, Vector> sample_mixed_ell_logell(const MvEllipticalParams& p,
                                                  int k1,
                                                  const GeneratorSpec& spec,
                                                  Rng& rng) {
  if (k1 < 0 || k1 > p.partition.k()) {
    throw DimensionMismatch("k1 must lie in [0, k]");
  }
  int n1 = 0;
  for (int i = 0; i < k1; ++i) n1 += p.partition.dims[i];
  Vector z = sample_mv_elliptical(p, spec, rng);
  Vector v = z.tail(z.size() - n1).array().exp();
  return {z.head(n1), v};
}

//---------------------------------------------------------------------------
// t / Pearson II families
//---------------------------------------------------------------------------

std::vector<Vector> sample_mv_t(const MvTParams& p, Rng& rng) {
  p.validate();
  // s0 = |x_0|^2 with x_0 standard normal in dimension 2 alpha0.
  double s0 = 2.0 * rng.gamma(p.alpha0);
  double inv = 1.0 / std::sqrt(s0);
  std::vector<Vector> t;
  for (std::size_t i = 0; i < p.dims.size(); ++i) {
    Vector g(p.dims[i]);
    for (int j = 0; j < p.dims[i]; ++j) g(j) = rng.normal();
    t.push_back(std::sqrt(p.betas[i]) * inv * g);
  }
  return t;
}

std::vector<Vector> sample_mv_pearson2(const MvTParams& p, Rng& rng) {
  std::vector<Vector> t = sample_mv_t(p, rng);
  for (auto& ti : t) ti /= std::sqrt(1.0 + ti.squaredNorm());
  return t;
}

namespace {

// Radius and Dirichlet split shared by the (s0, t) style samplers: returns
// log R^2 (R the radius in dimension 2 sum(shapes)) and log D.
std::pair<double, std::vector<double>> radial_dirichlet(
    const GeneratorSpec& spec, const std::vector<double>& shapes, Rng& rng) {
  double total = 0.0;
  for (double a : shapes) total += a;
  auto sampler = RadialSampler::get({spec, 2.0 * total});
  double log_r2 = sampler->draw_log_sq(rng);
  return {log_r2, sample_log_dirichlet(shapes, rng)};
}

JointDraw gengamma_pearson_draw(const GenGammaPearsonParams& p, Rng& rng,
                                bool pearson2) {
  p.validate();
  std::vector<double> shapes{p.alpha0};
  for (int d : p.dims) shapes.push_back(0.5 * d);
  auto [log_r2, log_d] = radial_dirichlet(p.spec, shapes, rng);
  JointDraw out;
  out.s0 = std::exp(std::log(p.sigma0_sq) + log_r2 + log_d[0]);
  for (std::size_t i = 0; i < p.dims.size(); ++i) {
    Vector dir = sample_unit_sphere(p.dims[i], rng);
    double log_f =
        std::log(p.sigma_sq[i]) - std::log(p.sigma0_sq) + log_d[i + 1] - log_d[0];
    if (pearson2) {
      out.blocks.push_back(std::sqrt(ratio_to_unit(log_f)) * dir);
    } else {
      out.blocks.push_back(std::exp(0.5 * log_f) * dir);
    }
  }
  return out;
}

}  // namespace

JointDraw sample_gengamma_pearson7(const GenGammaPearsonParams& p, Rng& rng) {
  return gengamma_pearson_draw(p, rng, false);
}

JointDraw sample_gengamma_pearson2(const GenGammaPearsonParams& p, Rng& rng) {
  return gengamma_pearson_draw(p, rng, true);
}

//---------------------------------------------------------------------------
// Scalar families
//---------------------------------------------------------------------------

namespace {

std::vector<double> log_gengamma(const std::vector<double>& shapes,
                                 const std::vector<double>& scales,
                                 const GeneratorSpec& spec, Rng& rng) {
  auto [log_r2, log_d] = radial_dirichlet(spec, shapes, rng);
  std::vector<double> out(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    out[i] = std::log(scales[i]) + log_r2 + log_d[i];
  }
  return out;
}

std::vector<double> log_beta2(const BetaParams& p, Rng& rng) {
  std::vector<double> shapes{p.shape.alpha0};
  shapes.insert(shapes.end(), p.shape.alphas.begin(), p.shape.alphas.end());
  auto log_d = sample_log_dirichlet(shapes, rng);
  std::vector<double> out(p.shape.alphas.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::log(p.betas[i]) + log_d[i + 1] - log_d[0];
  }
  return out;
}

}  // namespace

Vector sample_mv_gengamma(const ScaleShapeParams& p, const GeneratorSpec& spec,
                          Rng& rng) {
  p.validate();
  auto lu = log_gengamma(p.shapes, p.scales, spec, rng);
  Vector u(static_cast<Eigen::Index>(lu.size()));
  for (std::size_t i = 0; i < lu.size(); ++i) u(i) = std::exp(lu[i]);
  return u;
}

Vector sample_mv_beta2(const BetaParams& p, Rng& rng) {
  p.validate();
  auto lf = log_beta2(p, rng);
  Vector f(static_cast<Eigen::Index>(lf.size()));
  for (std::size_t i = 0; i < lf.size(); ++i) f(i) = std::exp(lf[i]);
  return f;
}

Vector sample_mv_beta1(const BetaParams& p, Rng& rng) {
  p.validate();
  auto lf = log_beta2(p, rng);
  Vector b(static_cast<Eigen::Index>(lf.size()));
  for (std::size_t i = 0; i < lf.size(); ++i) b(i) = ratio_to_unit(lf[i]);
  return b;
}

namespace {

std::pair<double, std::vector<double>> gengamma_beta_logs(
    const GenGammaBetaParams& p, Rng& rng) {
  p.validate();
  std::vector<double> shapes{p.shape.alpha0};
  shapes.insert(shapes.end(), p.shape.alphas.begin(), p.shape.alphas.end());
  auto [log_r2, log_d] = radial_dirichlet(p.spec, shapes, rng);
  double s0 = std::exp(std::log(p.sigma0_sq) + log_r2 + log_d[0]);
  std::vector<double> lf(p.shape.alphas.size());
  for (std::size_t i = 0; i < lf.size(); ++i) {
    lf[i] = std::log(p.sigma_sq[i]) - std::log(p.sigma0_sq) + log_d[i + 1] -
            log_d[0];
  }
  return {s0, lf};
}

}  // namespace

std::pair<double, Vector> sample_gengamma_beta1(const GenGammaBetaParams& p,
                                                Rng& rng) {
  auto [s0, lf] = gengamma_beta_logs(p, rng);
  Vector b(static_cast<Eigen::Index>(lf.size()));
  for (std::size_t i = 0; i < lf.size(); ++i) b(i) = ratio_to_unit(lf[i]);
  return {s0, b};
}

std::pair<double, Vector> sample_gengamma_beta2(const GenGammaBetaParams& p,
                                                Rng& rng) {
  auto [s0, lf] = gengamma_beta_logs(p, rng);
  Vector f(static_cast<Eigen::Index>(lf.size()));
  for (std::size_t i = 0; i < lf.size(); ++i) f(i) = std::exp(lf[i]);
  return {s0, f};
}

std::pair<Vector, Vector> sample_gamma_loggamma(const GammaLogGammaParams& p,
                                                Rng& rng) {
  p.validate();
  std::vector<double> shapes = p.alphas;
  shapes.insert(shapes.end(), p.rhos.begin(), p.rhos.end());
  std::vector<double> scales = p.sigma_sq;
  scales.insert(scales.end(), p.delta_sq.begin(), p.delta_sq.end());
  auto lu = log_gengamma(shapes, scales, p.spec, rng);
  std::size_t k1 = p.alphas.size();
  Vector u(static_cast<Eigen::Index>(k1));
  Vector y(static_cast<Eigen::Index>(p.rhos.size()));
  for (std::size_t i = 0; i < k1; ++i) u(i) = std::exp(lu[i]);
  for (std::size_t j = 0; j < p.rhos.size(); ++j) y(j) = lu[k1 + j];
  return {u, y};
}

//---------------------------------------------------------------------------
// Batch sampling
//---------------------------------------------------------------------------

int configured_threads() {
  if (const char* env = std::getenv("MULTIVEC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Matrix sample_rows(std::int64_t n, int cols, std::uint64_t seed,
                   const std::function<void(Rng&, double*)>& row, int threads) {
  if (n < 0 || cols < 0) throw PreconditionError("negative sample size");
  std::vector<double> buf(static_cast<std::size_t>(n) * cols);
  std::int64_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  if (threads <= 0) threads = configured_threads();
  threads = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(chunks, 1)));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
        std::int64_t end = std::min(n, (c + 1) * kSampleChunk);
        for (std::int64_t i = c * kSampleChunk; i < end; ++i) {
          row(rng, buf.data() + i * cols);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>;
  return Eigen::Map<RowMajor>(buf.data(), n, cols);
}

}  // namespace multivec
