#pragma once

// Implementations of the betarc subcommands. The executable in betarc.cpp
// only parses flags into these option structs; tests drive them directly.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "betarc/betarc.hpp"

namespace betarc::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

/// Invalid flag value; the message names the flag.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& flag, const std::string& what)
      : std::runtime_error(flag + ": " + what), flag_(flag) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

namespace detail {

inline MapSpec make_map(const std::string& name, double theta) {
  MapFamily family{};
  try {
    family = parse_map_family(name);
  } catch (const DomainError& e) {
    throw UsageError("--map", e.what());
  }
  try {
    return MapSpec(family, theta);
  } catch (const DomainError& e) {
    throw UsageError("--theta", e.what());
  }
}

inline LinkFn make_link(const std::string& flag, const std::string& name) {
  try {
    return parse_link(name);
  } catch (const DomainError& e) {
    throw UsageError(flag, e.what());
  }
}

inline void require(bool ok, const std::string& flag, const std::string& what) {
  if (!ok) throw UsageError(flag, what);
}

inline std::ofstream open_output(const std::string& path) {
  if (auto parent = std::filesystem::path(path).parent_path(); !parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string map = "bernoulli";
  double theta = 3.0;
  double nu = 40.0;
  double u0 = 0.5;
  std::size_t n = 100;
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::vector<double> phi;
  double alpha = 0.0;
  std::vector<double> beta;
  std::string link_g = "identity";
  std::string link_h = "identity";
  std::string covariates;  // CSV path, empty for none
  std::string output = "simulated.csv";
};

/// Writes columns t, y, mu.
inline SimulationResult run_simulate(const SimulateOptions& o) {
  ModelSpec spec;
  spec.map = detail::make_map(o.map, o.theta);
  spec.g = detail::make_link("--link-g", o.link_g);
  spec.h = detail::make_link("--link-h", o.link_h);
  spec.p = o.p;
  detail::require(o.phi.size() == o.p, "--phi", "expected " + std::to_string(o.p) + " AR coefficients");
  detail::require(o.nu > 0.0, "--nu", "precision must be positive");
  detail::require(o.u0 > 0.0 && o.u0 < 1.0, "--u0", "must lie in (0,1)");
  detail::require(o.n >= 1, "--n", "must be at least 1");

  std::optional<Covariates> X;
  if (!o.covariates.empty()) {
    X = read_covariates_csv(o.covariates);
    spec.l = X->cols;
    detail::require(X->rows >= o.n, "--covariates", "fewer rows than --n");
  }
  detail::require(o.beta.size() == spec.l, "--beta", "expected one coefficient per covariate column");

  ParamVector gamma;
  gamma.nu = o.nu;
  gamma.alpha = o.alpha;
  gamma.beta = o.beta;
  gamma.phi = o.phi;
  gamma.theta = o.theta;
  gamma.u0 = o.u0;

  CounterRng rng(o.seed);
  SimulationResult sim = simulate(spec, gamma, o.n, rng, X);
  std::vector<double> t(o.n);
  for (std::size_t i = 0; i < o.n; ++i) t[i] = static_cast<double>(i + 1);
  auto out = detail::open_output(o.output);
  write_csv(out, {"t", "y", "mu"}, {t, sim.sample.y, sim.mu});
  return sim;
}

// ---------------------------------------------------------------------------

struct FitCommandOptions {
  std::string data;
  std::string map = "mp";
  std::optional<double> theta;  // required for Bernoulli; start value otherwise
  std::size_t p = 0;
  std::string link_g = "identity";
  std::string link_h = "identity";
  std::optional<std::size_t> u0_grid;
  std::optional<double> u0;
  std::size_t holdout = 0;
  std::uint64_t seed = 0;
  bool two_stage = false;
  std::size_t lb_lags = 20;
  std::string output = "report.json";
  bool timing = false;
};

inline RunReport run_fit(const FitCommandOptions& o) {
  const auto started = std::chrono::steady_clock::now();
  detail::require(!(o.u0_grid && o.u0), "--u0", "give either --u0 or --u0-grid, not both");
  if (o.u0) detail::require(*o.u0 > 0.0 && *o.u0 < 1.0, "--u0", "must lie in (0,1)");
  if (o.u0_grid) detail::require(*o.u0_grid >= 1, "--u0-grid", "must be at least 1");

  MapFamily family{};
  try {
    family = parse_map_family(o.map);
  } catch (const DomainError& e) {
    throw UsageError("--map", e.what());
  }
  detail::require(family != MapFamily::Bernoulli || o.theta, "--theta", "Bernoulli maps need the integer k");
  ModelSpec spec;
  const Bounds default_bounds = Bounds::defaults(ModelSpec{{}, {}, MapSpec(family, family == MapFamily::Bernoulli ? 3.0 : 0.5), 0, 0});
  const std::size_t ti = 2;  // theta slot when p = l = 0
  const double theta0 = o.theta.value_or(0.5 * (default_bounds.lower[ti] + default_bounds.upper[ti]));
  spec.map = detail::make_map(o.map, theta0);
  spec.g = detail::make_link("--link-g", o.link_g);
  spec.h = detail::make_link("--link-h", o.link_h);
  spec.p = o.p;

  DataFile df = read_data_csv(o.data);
  spec.l = df.covariate_names.size();
  const std::size_t total = df.sample.size();
  if (o.holdout >= total) throw DataError("holdout leaves no observations to fit");
  const std::size_t n_fit = total - o.holdout;
  if (n_fit <= spec.p) throw DataError("fitting sample must be longer than the AR order");
  if (n_fit <= o.lb_lags) throw DataError("fitting sample must be longer than the Ljung-Box lag count");

  SeriesSample fit_sample;
  fit_sample.y.assign(df.sample.y.begin(), df.sample.y.begin() + static_cast<std::ptrdiff_t>(n_fit));
  std::vector<double> holdout_y(df.sample.y.begin() + static_cast<std::ptrdiff_t>(n_fit), df.sample.y.end());
  std::optional<Covariates> holdout_X;
  if (df.sample.X) {
    Covariates a(n_fit, spec.l), b(o.holdout, spec.l);
    for (std::size_t t = 0; t < total; ++t)
      for (std::size_t j = 0; j < spec.l; ++j) (t < n_fit ? a(t, j) : b(t - n_fit, j)) = (*df.sample.X)(t, j);
    fit_sample.X = std::move(a);
    if (o.holdout > 0) holdout_X = std::move(b);
  }

  FitOptions fo;
  fo.two_stage = o.two_stage;
  if (o.theta) {
    // user-supplied theta is the starting value (or the fixed slope)
    const std::vector<bool> free = default_free(spec);
    const Bounds bounds = Bounds::defaults(spec);
    ParamVector start = default_start(spec, fit_sample, kU0GridLower, bounds, free);
    start.theta = *o.theta;
    fo.start = start;
  }

  std::vector<FitResult> fits;
  std::size_t grid_size = 1;
  if (o.u0) {
    fo.u0 = *o.u0;
    if (fo.start) fo.start->u0 = *o.u0;
    fits.push_back(fit(spec, fit_sample, fo));
  } else {
    grid_size = o.u0_grid.value_or(900);
    fits = fit_u0_grid_candidates(spec, fit_sample, fo, grid_size);
  }

  RunReport report;
  report.spec = describe(spec);
  report.seed = o.seed;
  report.n_fit = n_fit;
  report.holdout = o.holdout;
  report.grid_size = grid_size;
  report.two_stage = o.two_stage;
  if (!o.u0) report.u0_trace = u0_trace(fits);

  std::vector<Candidate> candidates;
  candidates.reserve(fits.size());
  for (auto& f : fits) {
    if (!std::isfinite(f.loglik)) continue;
    try {
      candidates.push_back(make_candidate(std::move(f), fit_sample, o.lb_lags));
    } catch (const NumericalError&) {
    }
  }
  if (candidates.empty()) throw NumericalError("no fit produced a finite likelihood");

  const ParamLayout layout(spec);
  try {
    const Selection sel = model_select(candidates, layout);
    report.admissible = sel.admissible.size();
    report.models.push_back(
        model_report("best_by_mape_in", spec, candidates[sel.best_by_mape_in], fit_sample, holdout_y, holdout_X));
    report.models.push_back(
        model_report("best_by_loglik", spec, candidates[sel.best_by_loglik], fit_sample, holdout_y, holdout_X));
    report.best_by_mape_in = 0;
    report.best_by_loglik = 1;
  } catch (const NumericalError&) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (candidates[i].fit.loglik > candidates[best].fit.loglik) best = i;
    report.admissible = 0;
    report.models.push_back(
        model_report("highest_loglik_unfiltered", spec, candidates[best], fit_sample, holdout_y, holdout_X));
  }
  if (o.timing) {
    report.timing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  auto out = detail::open_output(o.output);
  out << nlohmann::json(report).dump(2) << '\n';
  return report;
}

// ---------------------------------------------------------------------------

struct McCommandOptions {
  std::string config;  // JSON path
  std::string preset;  // "table1"
  std::optional<std::size_t> replicates;
  std::optional<std::uint64_t> seed;
  std::string output_dir = "mc_out";
};

/// Writes summary.json plus one replicate CSV per cell.
inline MCSummary run_mc_command(const McCommandOptions& o) {
  detail::require(o.config.empty() != o.preset.empty(), "--config", "give exactly one of --config or --preset");
  MCConfig cfg;
  if (!o.preset.empty()) {
    detail::require(o.preset == "table1", "--preset", "unknown preset '" + o.preset + "'");
    cfg = MCConfig::table1();
  } else {
    std::ifstream in(o.config);
    if (!in) throw DataError("cannot open config '" + o.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("config is not valid JSON: ") + e.what());
    }
    cfg = mc_config_from_json(j);
  }
  if (o.replicates) {
    detail::require(*o.replicates >= 1, "--replicates", "must be at least 1");
    cfg.replicates = *o.replicates;
  }
  if (o.seed) cfg.seed = *o.seed;

  const MCSummary summary = run_mc(cfg);
  std::filesystem::create_directories(o.output_dir);
  {
    auto out = detail::open_output((std::filesystem::path(o.output_dir) / "summary.json").string());
    out << to_json(summary).dump(2) << '\n';
  }
  for (std::size_t i = 0; i < summary.cells.size(); ++i) {
    const MCCell& c = summary.cells[i];
    char name[32];
    std::snprintf(name, sizeof name, "cell_%02zu.csv", i);
    auto out = detail::open_output((std::filesystem::path(o.output_dir) / name).string());
    std::vector<double> rep(c.estimates.size());
    for (std::size_t r = 0; r < rep.size(); ++r) rep[r] = static_cast<double>(r);
    if (cfg.estimate_theta) write_csv(out, {"replicate", "nu_hat", "theta_hat"}, {rep, c.estimates, c.theta_estimates});
    else write_csv(out, {"replicate", "nu_hat"}, {rep, c.estimates});
  }
  return summary;
}

// ---------------------------------------------------------------------------

struct DensityOptions {
  std::string map = "bernoulli";
  double theta = 3.0;
  double nu = 15.0;
  double u0 = 0.7853981633974483;  // pi / 4
  std::string method = "quadrature";
  std::size_t grid = 101;
  std::size_t orbit_length = 1'000'000;
  std::size_t sample_size = 0;  // > 0 also writes a histogram of a simulated sample
  std::size_t bins = 50;
  std::uint64_t seed = 0;
  std::string output = "density.csv";
  std::string histogram_output = "histogram.csv";
};

struct DensityCurve {
  std::vector<double> y;
  std::vector<double> density;
};

/// y-grid point i of `grid` interior points: (i + 1) / (grid + 1).
inline double density_grid_point(std::size_t i, std::size_t grid) {
  return static_cast<double>(i + 1) / static_cast<double>(grid + 1);
}

inline DensityCurve run_density(const DensityOptions& o) {
  const ModelSpec spec = ModelSpec::pure_chaotic(detail::make_map(o.map, o.theta));
  detail::require(o.nu > 0.0, "--nu", "precision must be positive");
  detail::require(o.u0 > 0.0 && o.u0 < 1.0, "--u0", "must lie in (0,1)");
  detail::require(o.grid >= 1, "--grid", "must be at least 1");
  detail::require(o.method == "quadrature" || o.method == "orbit", "--method", "use 'quadrature' or 'orbit'");
  const DensityMethod method = o.method == "quadrature" ? DensityMethod::Quadrature : DensityMethod::OrbitMC;
  if (method == DensityMethod::Quadrature && !has_invariant_density(spec.map)) {
    throw UsageError("--method", "quadrature needs a closed-form invariant density; use --method orbit");
  }
  ParamVector gamma;
  gamma.nu = o.nu;
  gamma.theta = o.theta;
  gamma.u0 = o.u0;

  DensityCurve curve;
  curve.y.resize(o.grid);
  curve.density.resize(o.grid);
  parallel_for(o.grid, [&](std::size_t i) {
    curve.y[i] = density_grid_point(i, o.grid);
    curve.density[i] = unconditional_density(spec, gamma, curve.y[i], method, o.orbit_length);
  });
  {
    auto out = detail::open_output(o.output);
    write_csv(out, {"y", "density"}, {curve.y, curve.density});
  }
  if (o.sample_size > 0) {
    detail::require(o.bins >= 1, "--bins", "must be at least 1");
    CounterRng rng(o.seed);
    const SimulationResult sim = simulate(spec, gamma, o.sample_size, rng);
    std::vector<double> left(o.bins), right(o.bins), dens(o.bins, 0.0);
    const double width = 1.0 / static_cast<double>(o.bins);
    for (std::size_t b = 0; b < o.bins; ++b) {
      left[b] = static_cast<double>(b) * width;
      right[b] = static_cast<double>(b + 1) * width;
    }
    for (double y : sim.sample.y) {
      const auto b = std::min(o.bins - 1, static_cast<std::size_t>(y * static_cast<double>(o.bins)));
      dens[b] += 1.0;
    }
    for (double& d : dens) d /= static_cast<double>(o.sample_size) * width;
    auto out = detail::open_output(o.histogram_output);
    write_csv(out, {"bin_left", "bin_right", "density"}, {left, right, dens});
  }
  return curve;
}

}  // namespace betarc::cli
