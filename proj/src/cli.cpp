// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#include "multivec/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multivec/densities.hpp"
#include "multivec/errors.hpp"
#include "multivec/generators.hpp"
#include "multivec/io.hpp"
#include "multivec/mle.hpp"
#include "multivec/sampling.hpp"
#include "multivec/validation.hpp"

namespace multivec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_sig(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

// Writes to the named file, or to `out` for "-".
void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(out);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  body(f);
  f.flush();
  if (!f) throw InputError("failed writing '" + path + "'");
}

// Number of consecutive keys prefix1, prefix2, ... present.
int count_indexed(const ParamsDocument& d, const std::string& prefix) {
  int k = 0;
  while (d.params.count(prefix + std::to_string(k + 1))) ++k;
  return k;
}

GeneratorSpec kotz_from(const ParamsDocument& d, const std::string& suffix) {
  return GeneratorSpec::kotz(d.get("r" + suffix), d.get("q" + suffix),
                             d.get("s" + suffix));
}

// One or two scalar Kotz-gamma coordinates. A fit document in independent
// mode carries one generator per variable; otherwise the two coordinates
// share a generator.
double kotz_gamma_logpdf(const ParamsDocument& d, const std::vector<double>& x) {
  if (x.size() == 1) {
    ScaleShapeParams p{{d.get("alpha")}, {std::pow(d.get("sigma"), 2)}};
    Vector u(1);
    u(0) = x[0];
    return logpdf_mv_gengamma(p, kotz_from(d, ""), u);
  }
  if (x.size() != 2) {
    throw DimensionMismatch("kotz-gamma points have 1 or 2 coordinates, got " +
                            std::to_string(x.size()));
  }
  if (d.mode == "independent") {
    ScaleShapeParams pu{{d.get("alpha")}, {std::pow(d.get("sigma1"), 2)}};
    ScaleShapeParams pv{{d.get("beta")}, {std::pow(d.get("sigma2"), 2)}};
    Vector u(1), v(1);
    u(0) = x[0];
    v(0) = x[1];
    return logpdf_mv_gengamma(pu, kotz_from(d, "1"), u) +
           logpdf_mv_gengamma(pv, kotz_from(d, "2"), v);
  }
  ScaleShapeParams p{{d.get("alpha"), d.get("beta")},
                     {std::pow(d.get("sigma1"), 2), std::pow(d.get("sigma2"), 2)}};
  Vector uv(2);
  uv << x[0], x[1];
  return logpdf_mv_gengamma(p, kotz_from(d, ""), uv);
}

BetaParams beta_params(const ParamsDocument& d) {
  int k = count_indexed(d, "alpha");
  if (k == 0) throw InputError("missing parameter 'alpha1'");
  BetaParams p;
  p.shape.alpha0 = d.get("alpha0");
  for (int i = 1; i <= k; ++i) {
    p.shape.alphas.push_back(d.get("alpha" + std::to_string(i)));
    p.betas.push_back(d.get("beta" + std::to_string(i)));
  }
  return p;
}

MvTParams t_params(const ParamsDocument& d) {
  int k = count_indexed(d, "beta");
  if (k == 0) throw InputError("missing parameter 'beta1'");
  MvTParams p;
  p.alpha0 = d.get("alpha0");
  p.dims.assign(k, 1);
  for (int i = 1; i <= k; ++i) p.betas.push_back(d.get("beta" + std::to_string(i)));
  return p;
}

Vector to_vector(const std::vector<double>& x) {
  Vector v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(i) = x[i];
  return v;
}

std::vector<Vector> scalar_blocks(const std::vector<double>& x) {
  std::vector<Vector> out;
  for (double v : x) out.push_back(Vector::Constant(1, v));
  return out;
}

const std::vector<std::string> kModels = {"kotz-gamma", "kotz-gamma-2d",
                                          "mv-beta1", "mv-beta2", "mv-t"};

void check_model(const std::string& m) {
  for (const auto& k : kModels) {
    if (k == m) return;
  }
  std::string list;
  for (const auto& k : kModels) list += (list.empty() ? "" : ", ") + k;
  throw InputError("unknown model '" + m + "' (known: " + list + ")");
}

double model_logpdf(const std::string& model, const ParamsDocument& d,
                    const std::vector<double>& x) {
  check_model(model);
  try {
    if (model == "kotz-gamma" || model == "kotz-gamma-2d") {
      if (model == "kotz-gamma-2d" && x.size() != 2) {
        throw DimensionMismatch("kotz-gamma-2d points have 2 coordinates");
      }
      return kotz_gamma_logpdf(d, x);
    }
    if (model == "mv-beta1") return logpdf_mv_beta1(beta_params(d), to_vector(x));
    if (model == "mv-beta2") return logpdf_mv_beta2(beta_params(d), to_vector(x));
    MvTParams p = t_params(d);
    if (x.size() != p.dims.size()) {
      throw DimensionMismatch("expected " + std::to_string(p.dims.size()) +
                              " coordinates, got " + std::to_string(x.size()));
    }
    return logpdf_mv_t(p, scalar_blocks(x));
  } catch (const NonPositiveInput&) {
    return -kInf;  // outside the support
  }
}

struct SampleOutput {
  std::vector<std::string> header;
  SampleMatrix data;
};

std::vector<std::string> indexed_header(const std::string& prefix, int k) {
  std::vector<std::string> h;
  for (int i = 1; i <= k; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

SampleOutput model_sample(const std::string& model, const ParamsDocument& d,
                          std::int64_t n, std::uint64_t seed) {
  check_model(model);
  SampleOutput s;
  if (model == "kotz-gamma" || model == "kotz-gamma-2d") {
    s.header = {"u", "v"};
    if (d.mode == "independent") {
      ScaleShapeParams pu{{d.get("alpha")}, {std::pow(d.get("sigma1"), 2)}};
      ScaleShapeParams pv{{d.get("beta")}, {std::pow(d.get("sigma2"), 2)}};
      GeneratorSpec gu = kotz_from(d, "1");
      GeneratorSpec gv = kotz_from(d, "2");
      pu.validate();
      pv.validate();
      s.data = sample_rows(n, 2, seed, [&](Rng& rng, double* out) {
        out[0] = sample_mv_gengamma(pu, gu, rng)(0);
        out[1] = sample_mv_gengamma(pv, gv, rng)(0);
      });
      return s;
    }
    // The dependent model treats the whole sample as one draw: 2n blocks
    // sharing one generator, u_1..u_n first.
    const double a = d.get("alpha");
    const double b = d.get("beta");
    const double s1 = std::pow(d.get("sigma1"), 2);
    const double s2 = std::pow(d.get("sigma2"), 2);
    GeneratorSpec g = kotz_from(d, "");
    s.data.resize(n, 2);
    if (n == 0) return s;
    ScaleShapeParams p;
    p.shapes.assign(n, a);
    p.shapes.insert(p.shapes.end(), n, b);
    p.scales.assign(n, s1);
    p.scales.insert(p.scales.end(), n, s2);
    Rng rng(seed);
    Vector x = sample_mv_gengamma(p, g, rng);
    for (std::int64_t i = 0; i < n; ++i) {
      s.data(i, 0) = x(i);
      s.data(i, 1) = x(n + i);
    }
    return s;
  }
  if (model == "mv-beta1" || model == "mv-beta2") {
    BetaParams p = beta_params(d);
    p.validate();
    int k = static_cast<int>(p.betas.size());
    s.header = indexed_header(model == "mv-beta1" ? "b" : "f", k);
    bool first = model == "mv-beta1";
    s.data = sample_rows(n, k, seed, [&](Rng& rng, double* out) {
      Vector v = first ? sample_mv_beta1(p, rng) : sample_mv_beta2(p, rng);
      for (int i = 0; i < k; ++i) out[i] = v(i);
    });
    return s;
  }
  MvTParams p = t_params(d);
  p.validate();
  int k = static_cast<int>(p.dims.size());
  s.header = indexed_header("t", k);
  s.data = sample_rows(n, k, seed, [&](Rng& rng, double* out) {
    std::vector<Vector> t = sample_mv_t(p, rng);
    for (int i = 0; i < k; ++i) out[i] = t[i](0);
  });
  return s;
}

//---------------------------------------------------------------------------
// Subcommands
//---------------------------------------------------------------------------

struct FitArgs {
  std::string model = "kotz-gamma";
  std::string mode = "dependent";
  std::string input;
  std::string out = "-";
  int restarts = 3;
  int max_iters = 10000;
  bool freeze = false;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.model != "kotz-gamma") {
    throw InputError("fit supports --model kotz-gamma only");
  }
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw InputError("cannot open input '" + a.input + "'");
  SampleMatrix data = read_csv(in, {"u", "v"}, true);
  if (data.rows() < 3) {
    throw InputError("need at least 3 data rows, got " +
                     std::to_string(data.rows()));
  }
  FitOptions o;
  o.restarts = a.restarts;
  o.optimizer.max_iters = a.max_iters;
  o.freeze_generator = a.freeze;
  FitResult r = a.mode == "dependent" ? fit_dependent(data, o)
                                      : fit_independent(data, o);
  ParamsDocument d;
  d.model = a.model;
  d.mode = a.mode;
  d.params = r.params;
  if (std::isfinite(r.loglik)) d.loglik = r.loglik;
  d.meta = {{"version", kVersion},
            {"seed", nullptr},
            {"m", static_cast<std::int64_t>(data.rows())},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"restarts", r.restarts},
            {"restart_policy", r.restart_policy},
            {"initial_loglik", r.initial_loglik},
            {"generator_frozen", a.freeze}};
  emit(a.out, out, [&](std::ostream& os) { os << d.dump(); });
  if (!r.converged) {
    err << "warning: optimizer stopped without meeting the convergence "
           "tolerance\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_eval(const std::string& model, const std::string& params_path,
             const std::string& point, std::ostream& out) {
  check_model(model);
  ParamsDocument d = read_params_file(params_path);
  std::vector<double> x = parse_list(point, "--point");
  out << format_sig(model_logpdf(model, d, x), 12) << "\n";
  return kExitOk;
}

int cmd_sample(const std::string& model, const std::string& params_path,
               std::int64_t n, std::uint64_t seed, const std::string& path,
               std::ostream& out) {
  check_model(model);
  if (n < 0) throw InputError("-n must be >= 0");
  ParamsDocument d = read_params_file(params_path);
  SampleOutput s = model_sample(model, d, n, seed);
  emit(path, out, [&](std::ostream& os) { write_csv(os, s.header, s.data); });
  return kExitOk;
}

int cmd_check(const std::string& suite, std::uint64_t seed,
              std::int64_t draws, bool corrupt, std::ostream& out) {
  SuiteOptions o;
  o.seed = seed;
  o.draws = draws;
  o.corrupt = corrupt;
  std::vector<CheckReport> reports;
  auto run = [&](const std::vector<CheckReport>& rs) {
    for (const CheckReport& r : rs) {
      out << to_json_line(r) << "\n";
      out.flush();
      reports.push_back(r);
    }
  };
  if (suite == "normalization" || suite == "all") run(normalization_suite(o));
  if (suite == "identities" || suite == "all") run(identities_suite(o));
  if (suite == "pushforward" || suite == "all") run(pushforward_suite(o));
  for (const CheckReport& r : reports) {
    if (!r.passed) return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_grid(const std::string& model, const std::string& params_path,
             const std::string& range, int steps, const std::string& path,
             std::ostream& out) {
  if (model != "kotz-gamma-2d") {
    throw InputError("grid supports --model kotz-gamma-2d only");
  }
  std::vector<double> r = parse_list(range, "--range");
  if (r.size() != 4) {
    throw InputError("--range needs umin,umax,vmin,vmax");
  }
  for (double v : r) {
    if (!std::isfinite(v)) throw InputError("--range values must be finite");
  }
  if (steps < 1) throw InputError("--steps must be >= 1");
  if (!(r[0] < r[1]) || !(r[2] < r[3])) {
    throw InputError("--range needs umin < umax and vmin < vmax");
  }
  if (r[0] < 0.0 || r[2] < 0.0) {
    throw InputError("--range must lie in the positive quadrant");
  }
  ParamsDocument d = read_params_file(params_path);
  // Validate the parameters once so that a bad file fails before output.
  (void)model_logpdf(model, d, {0.5 * (r[0] + r[1]), 0.5 * (r[2] + r[3])});
  const double du = steps > 1 ? (r[1] - r[0]) / (steps - 1) : 0.0;
  const double dv = steps > 1 ? (r[3] - r[2]) / (steps - 1) : 0.0;
  SampleMatrix g(static_cast<Eigen::Index>(steps) * steps, 3);
  Eigen::Index row = 0;
  for (int i = 0; i < steps; ++i) {
    const double u = i == steps - 1 && steps > 1 ? r[1] : r[0] + i * du;
    for (int j = 0; j < steps; ++j) {
      const double v = j == steps - 1 && steps > 1 ? r[3] : r[2] + j * dv;
      double p = std::exp(model_logpdf(model, d, {u, v}));
      if (!(p >= std::numeric_limits<double>::min())) p = 0.0;
      g(row, 0) = u;
      g(row, 1) = v;
      g(row, 2) = p;
      ++row;
    }
  }
  emit(path, out, [&](std::ostream& os) { write_csv(os, {"u", "v", "pdf"}, g); });
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multivector variate distributions: fit, evaluate, sample, "
               "check and grid."};
  app.name("multivec");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit the Kotz-gamma model to u,v pairs");
  fit->add_option("--model", fa.model, "Model name")->capture_default_str();
  fit->add_option("--mode", fa.mode, "dependent or independent")
      ->check(CLI::IsMember({"dependent", "independent"}))
      ->capture_default_str();
  fit->add_option("--input", fa.input, "CSV with header u,v")->required();
  fit->add_option("--out", fa.out, "Output JSON path, - for stdout")
      ->capture_default_str();
  fit->add_option("--restarts", fa.restarts, "Optimizer runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--max-iters", fa.max_iters, "Iterations per optimizer run")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_flag("--freeze-generator", fa.freeze,
                "Hold (r, q, s) at the normal generator (1/2, 1, 1)");

  std::string model, params, point, out_path = "-", suite, range;
  std::int64_t n = 0;
  std::uint64_t seed = 1;
  std::uint64_t check_seed = kDefaultCheckSeed;
  std::int64_t draws = 100000;
  bool corrupt = false;
  int steps = 0;

  auto* eval = app.add_subcommand("eval", "Print a log-density");
  eval->add_option("--model", model, "Model name")->required();
  eval->add_option("--params", params, "Params JSON")->required();
  eval->add_option("--point", point, "Comma-separated coordinates")->required();

  auto* sample = app.add_subcommand("sample", "Draw a sample to CSV");
  sample->add_option("--model", model, "Model name")->required();
  sample->add_option("--params", params, "Params JSON")->required();
  sample->add_option("-n", n, "Number of rows")->required();
  sample->add_option("--seed", seed, "RNG seed")->capture_default_str();
  sample->add_option("--out", out_path, "Output CSV path, - for stdout")
      ->capture_default_str();

  auto* check = app.add_subcommand("check", "Run validation suites");
  check->add_option("--suite", suite, "normalization, identities, pushforward or all")
      ->required()
      ->check(CLI::IsMember({"normalization", "identities", "pushforward", "all"}));
  check->add_option("--seed", check_seed, "Base seed")->capture_default_str();
  check->add_option("--draws", draws, "Draws per sampling check")
      ->check(CLI::PositiveNumber)
      ->group("");
  check->add_flag("--corrupt", corrupt, "Doubles every density under test")
      ->group("");

  auto* grid = app.add_subcommand("grid", "Tabulate a 2-d density on a grid");
  grid->add_option("--model", model, "Model name")->required();
  grid->add_option("--params", params, "Params JSON")->required();
  grid->add_option("--range", range, "umin,umax,vmin,vmax")->required();
  grid->add_option("--steps", steps, "Points per axis")->required();
  grid->add_option("--out", out_path, "Output CSV path, - for stdout")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*fit) return cmd_fit(fa, out, err);
    if (*eval) return cmd_eval(model, params, point, out);
    if (*sample) return cmd_sample(model, params, n, seed, out_path, out);
    if (*check) return cmd_check(suite, check_seed, draws, corrupt, out);
    if (*grid) return cmd_grid(model, params, range, steps, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace multivec
