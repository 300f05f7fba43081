// betarc: simulate, fit, Monte Carlo and density commands.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

int report_error(const char* kind, const std::exception& e, int code) {
  std::cerr << "betarc: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace betarc::cli;
  CLI::App app{"Beta autoregressive chaotic models"};
  app.set_version_flag("--version", betarc::kVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate a series and write t, y, mu as CSV");
  s->add_option("--map", sim.map, "bernoulli | logistic | pwl | mp")->capture_default_str();
  s->add_option("--theta", sim.theta, "Map parameter")->capture_default_str();
  s->add_option("--nu", sim.nu, "Precision")->capture_default_str();
  s->add_option("--u0", sim.u0, "Initial orbit point")->capture_default_str();
  s->add_option("--n", sim.n, "Series length")->capture_default_str();
  s->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  s->add_option("--p", sim.p, "AR order")->capture_default_str();
  s->add_option("--phi", sim.phi, "AR coefficients")->delimiter(',');
  s->add_option("--alpha", sim.alpha, "Intercept")->capture_default_str();
  s->add_option("--beta", sim.beta, "Covariate coefficients")->delimiter(',');
  s->add_option("--link-g", sim.link_g, "identity | logit | cloglog")->capture_default_str();
  s->add_option("--link-h", sim.link_h, "identity | logit | cloglog")->capture_default_str();
  s->add_option("--covariates", sim.covariates, "Covariate CSV (header row, numeric columns)");
  s->add_option("-o,--output", sim.output, "Output CSV")->capture_default_str();

  FitCommandOptions fit;
  auto* f = app.add_subcommand("fit", "Fit by partial maximum likelihood and write a JSON report");
  f->add_option("--data", fit.data, "Input CSV with a y column")->required();
  f->add_option("--map", fit.map, "bernoulli | logistic | pwl | mp")->capture_default_str();
  f->add_option("--theta", fit.theta, "Map parameter: fixed k for bernoulli, start value otherwise");
  f->add_option("--p", fit.p, "AR order")->capture_default_str();
  f->add_option("--link-g", fit.link_g, "identity | logit | cloglog")->capture_default_str();
  f->add_option("--link-h", fit.link_h, "identity | logit | cloglog")->capture_default_str();
  auto* grid = f->add_option("--u0-grid", fit.u0_grid, "Number of u0 grid points (default 900)");
  f->add_option("--u0", fit.u0, "Fixed initial orbit point")->excludes(grid);
  f->add_option("--holdout", fit.holdout, "Rows reserved at the end for out-of-sample accuracy")
      ->capture_default_str();
  f->add_option("--seed", fit.seed, "Random seed (recorded in the report)")->capture_default_str();
  f->add_flag("--two-stage", fit.two_stage, "Quasi-Newton refinement before Nelder-Mead");
  f->add_option("--lb-lags", fit.lb_lags, "Ljung-Box lags")->capture_default_str();
  f->add_option("-o,--output", fit.output, "Output JSON")->capture_default_str();
  f->add_flag("--timing", fit.timing, "Record wall-clock time in the report");

  McCommandOptions mc;
  auto* m = app.add_subcommand("mc", "Monte Carlo study of the estimator");
  auto* cfg = m->add_option("--config", mc.config, "MCConfig JSON file");
  m->add_option("--preset", mc.preset, "Built-in design: table1")->excludes(cfg);
  m->add_option("--replicates", mc.replicates, "Replicates per cell");
  m->add_option("--seed", mc.seed, "Master seed");
  m->add_option("-o,--output-dir", mc.output_dir, "Output directory")->capture_default_str();

  DensityOptions dens;
  auto* d = app.add_subcommand("density", "Unconditional density of a pure chaotic model");
  d->add_option("--map", dens.map, "bernoulli | logistic | pwl | mp")->capture_default_str();
  d->add_option("--theta", dens.theta, "Map parameter")->capture_default_str();
  d->add_option("--nu", dens.nu, "Precision")->capture_default_str();
  d->add_option("--u0", dens.u0, "Orbit start for the orbit method")->capture_default_str();
  d->add_option("--method", dens.method, "quadrature | orbit")->capture_default_str();
  d->add_option("--grid", dens.grid, "Number of y grid points")->capture_default_str();
  d->add_option("--orbit-length", dens.orbit_length, "Orbit length for the orbit method")->capture_default_str();
  d->add_option("--sample-size", dens.sample_size, "Also write a histogram of a simulated sample of this size");
  d->add_option("--bins", dens.bins, "Histogram bins")->capture_default_str();
  d->add_option("--seed", dens.seed, "Random seed for the sample")->capture_default_str();
  d->add_option("-o,--output", dens.output, "Density CSV")->capture_default_str();
  d->add_option("--histogram-output", dens.histogram_output, "Histogram CSV")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s) run_simulate(sim);
    else if (*f) run_fit(fit);
    else if (*m) run_mc_command(mc);
    else if (*d) run_density(dens);
  } catch (const UsageError& e) {
    return report_error("usage error", e, kUsage);
  } catch (const betarc::DomainError& e) {
    return report_error("invalid argument", e, kUsage);
  } catch (const betarc::DataError& e) {
    return report_error("data error", e, kData);
  } catch (const betarc::NumericalError& e) {
    return report_error("numerical failure", e, kNumerical);
  } catch (const std::exception& e) {
    return report_error("numerical failure", e, kNumerical);
  }
  return kOk;
}
