#pragma once

// Replicate-generate-fit-summarize harness for pure chaotic models, plus a
// Shapiro-Wilk probe of the estimator's sampling distribution.

#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "betarc/errors.hpp"
#include "betarc/estimation.hpp"
#include "betarc/model.hpp"
#include "betarc/parallel.hpp"
#include "betarc/rng.hpp"

namespace betarc {

struct MCConfig {
  MapFamily family = MapFamily::Bernoulli;
  std::vector<double> map_params{3.0};
  std::vector<double> u0s{0.2 + std::numbers::pi / 100.0};
  std::vector<std::size_t> ns{100};
  double nu = 40.0;
  std::size_t replicates = 200;
  std::uint64_t seed = 0;
  bool estimate_theta = false;  // nu is always estimated; theta optionally

  void validate() const {
    if (replicates < 1) throw DomainError("replicates must be at least 1");
    if (map_params.empty() || u0s.empty() || ns.empty()) throw DomainError("empty scenario list");
    for (double u : u0s)
      if (!(u > 0.0 && u < 1.0)) throw DomainError("every u0 must lie in (0,1)");
    for (std::size_t n : ns)
      if (n < 10) throw DomainError("sample sizes must be at least 10");
    if (!(nu > 0.0)) throw DomainError("nu must be positive");
    for (double th : map_params) (void)MapSpec(family, th);
    if (estimate_theta && family == MapFamily::Bernoulli) {
      throw DomainError("the Bernoulli slope is an integer and cannot be estimated");
    }
  }

  std::size_t cell_count() const noexcept { return map_params.size() * u0s.size() * ns.size(); }

  /// 3 k x 3 u0 x 3 n design with nu = 40.
  static MCConfig table1(std::size_t replicates = 200, std::uint64_t seed = 7) {
    MCConfig c;
    c.family = MapFamily::Bernoulli;
    c.map_params = {3.0, 5.0, 7.0};
    c.u0s = {0.2 + std::numbers::pi / 100.0, 0.5 + std::numbers::pi / 100.0, 0.8 + std::numbers::pi / 100.0};
    c.ns = {100, 500, 1000};
    c.nu = 40.0;
    c.replicates = replicates;
    c.seed = seed;
    return c;
  }
};

struct MCCell {
  double map_param = 0.0;
  double u0 = 0.0;
  std::size_t n = 0;
  std::vector<double> estimates;  // nu-hat per replicate, NaN for excluded ones
  std::vector<double> theta_estimates;
  std::size_t failures = 0;
  double mean = 0.0;
  double sd = 0.0;
  double mape = 0.0;  // 100 * mean |nu_hat - nu| / nu
  bool failed = false;  // more than 2% of replicates excluded
};

struct MCSummary {
  MCConfig config;
  std::vector<MCCell> cells;  // ordered map parameter, then u0, then n
};

/// Summary statistics over the finite entries of `values`. sd uses the n - 1
/// denominator and is 0 for a single value.
inline void summarize(MCCell& cell, double truth) {
  std::vector<double> ok;
  for (double v : cell.estimates)
    if (std::isfinite(v)) ok.push_back(v);
  cell.failures = cell.estimates.size() - ok.size();
  cell.failed = static_cast<double>(cell.failures) > 0.02 * static_cast<double>(cell.estimates.size());
  if (ok.empty()) {
    cell.mean = cell.sd = cell.mape = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double m = static_cast<double>(ok.size());
  double sum = 0.0, abs_err = 0.0;
  for (double v : ok) {
    sum += v;
    abs_err += std::abs(v - truth);
  }
  cell.mean = sum / m;
  double ss = 0.0;
  for (double v : ok) ss += (v - cell.mean) * (v - cell.mean);
  cell.sd = ok.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
  cell.mape = 100.0 * abs_err / (m * truth);
}

/// Fit of one replicate; the generator is keyed by (seed, cell, replicate).
struct ReplicateOutcome {
  double nu_hat = std::numeric_limits<double>::quiet_NaN();
  double theta_hat = std::numeric_limits<double>::quiet_NaN();
};

inline ReplicateOutcome run_replicate(const MCConfig& cfg, std::size_t cell_index, double map_param, double u0,
                                      std::size_t n, std::size_t replicate) {
  const ModelSpec spec = ModelSpec::pure_chaotic(MapSpec(cfg.family, map_param));
  ParamVector truth;
  truth.nu = cfg.nu;
  truth.theta = map_param;
  truth.u0 = u0;
  CounterRng rng(derive_stream_key(cfg.seed, cell_index, replicate));
  const SimulationResult sim = simulate(spec, truth, n, rng);

  FitOptions opts;
  opts.start = truth;
  opts.wald = false;
  std::vector<bool> free(ParamLayout(spec).size(), false);
  free[ParamLayout::nu()] = true;
  if (cfg.estimate_theta) free.back() = true;
  opts.free = free;
  if (cfg.estimate_theta) {
    const Bounds b = Bounds::defaults(spec);
    opts.start->theta = 0.5 * (b.lower.back() + b.upper.back());
  }
  ReplicateOutcome out;
  try {
    const FitResult f = fit(spec, sim.sample, opts);
    if (f.converged && std::isfinite(f.loglik)) {
      out.nu_hat = f.gamma_hat.nu;
      out.theta_hat = f.gamma_hat.theta;
    }
  } catch (const std::exception&) {
  }
  return out;
}

/// Runs every cell and replicate. Each replicate owns a generator derived
/// from (seed, cell, replicate), so the summary does not depend on the
/// execution order or thread count.
inline MCSummary run_mc(const MCConfig& cfg) {
  cfg.validate();
  MCSummary summary;
  summary.config = cfg;
  for (double k : cfg.map_params)
    for (double u0 : cfg.u0s)
      for (std::size_t n : cfg.ns) {
        MCCell c;
        c.map_param = k;
        c.u0 = u0;
        c.n = n;
        c.estimates.assign(cfg.replicates, std::numeric_limits<double>::quiet_NaN());
        c.theta_estimates.assign(cfg.replicates, std::numeric_limits<double>::quiet_NaN());
        summary.cells.push_back(std::move(c));
      }
  const std::size_t jobs = summary.cells.size() * cfg.replicates;
  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t ci = job / cfg.replicates;
    const std::size_t r = job % cfg.replicates;
    MCCell& c = summary.cells[ci];
    const ReplicateOutcome o = run_replicate(cfg, ci, c.map_param, c.u0, c.n, r);
    c.estimates[r] = o.nu_hat;
    c.theta_estimates[r] = o.theta_hat;
  });
  for (MCCell& c : summary.cells) summarize(c, cfg.nu);
  return summary;
}

struct ShapiroWilkResult {
  double w = 0.0;
  double p_value = 0.0;
};

/// Shapiro-Wilk W with Royston's (1995) coefficient and p-value approximations.
inline ShapiroWilkResult normality_probe(std::vector<double> x) {
  const std::size_t n = x.size();
  if (n < 3 || n > 5000) throw DomainError("Shapiro-Wilk needs 3 <= n <= 5000");
  std::sort(x.begin(), x.end());
  if (!(x.back() - x.front() > 0.0)) throw NumericalError("Shapiro-Wilk undefined for a constant sample");

  const boost::math::normal_distribution<double> std_normal;
  const double dn = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::numbers::sqrt2 / 2.0;
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      // m for the upper order statistics, largest first
      m[i] = -boost::math::quantile(std_normal, (static_cast<double>(i + 1) - 0.375) / (dn + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(dn);
    auto poly = [](std::initializer_list<double> c, double v) {
      double r = 0.0, p = 1.0;
      for (double ci : c) {
        r += ci * p;
        p *= v;
      }
      return r;
    };
    const double a1 = poly({0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056}, rsn) + m[0] / ssumm2;
    std::size_t i1 = 1;
    double fac = 0.0;
    if (n > 5) {
      i1 = 2;
      const double a2 = m[1] / ssumm2 + poly({0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633}, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = i1; i < half; ++i) a[i] = m[i] / fac;
  }
  // a[i] pairs x[n-1-i] (positive weight) with x[i] (negative weight).
  double num = 0.0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= dn;
  double ssq = 0.0;
  for (double v : x) ssq += (v - mean) * (v - mean);
  double w = std::min(1.0, num * num / ssq);

  ShapiroWilkResult r;
  r.w = w;
  if (n == 3) {
    const double pi6 = 6.0 / std::numbers::pi;
    const double stqr = std::asin(std::sqrt(0.75));
    r.p_value = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return r;
  }
  double w1 = std::log1p(-w);
  double mu = 0.0, sigma = 0.0;
  if (n <= 11) {
    const double gamma = -2.273 + 0.459 * dn;
    mu = 0.544 - 0.39978 * dn + 0.025054 * dn * dn - 6.714e-4 * dn * dn * dn;
    sigma = std::exp(1.3822 - 0.77857 * dn + 0.062767 * dn * dn - 0.0020322 * dn * dn * dn);
    if (w1 >= gamma) {
      r.p_value = 0.0;
      return r;
    }
    w1 = -std::log(gamma - w1);
  } else {
    const double ln = std::log(dn);
    mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
    sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
  }
  r.p_value = boost::math::cdf(boost::math::complement(std_normal, (w1 - mu) / sigma));
  return r;
}

}  // namespace betarc
