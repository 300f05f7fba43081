#pragma once

// Partial maximum likelihood for the beta autoregressive chaotic model.
//
// The parameter vector is packed as (nu, alpha, beta_1..beta_l,
// phi_1..phi_p, theta); u0 is carried beside it and is never optimized
// directly (it is either known or scanned over a grid).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betarc/betadist.hpp"
#include "betarc/model.hpp"
#include "betarc/optimize.hpp"
#include "betarc/parallel.hpp"

namespace betarc {

inline constexpr double kU0GridLower = std::numbers::pi / 1000.0;
inline constexpr double kU0GridUpper = 1.0 - std::numbers::pi / 1000.0;

struct ParamLayout {
  std::size_t l = 0;
  std::size_t p = 0;

  explicit ParamLayout(const ModelSpec& spec) : l(spec.l), p(spec.p) {}

  std::size_t size() const noexcept { return 3 + l + p; }
  static constexpr std::size_t nu() noexcept { return 0; }
  static constexpr std::size_t alpha() noexcept { return 1; }
  std::size_t beta(std::size_t i) const noexcept { return 2 + i; }
  std::size_t phi(std::size_t j) const noexcept { return 2 + l + j; }
  std::size_t theta() const noexcept { return 2 + l + p; }

  std::vector<std::string> names() const {
    std::vector<std::string> out{"nu", "alpha"};
    for (std::size_t i = 0; i < l; ++i) out.push_back("beta" + std::to_string(i + 1));
    for (std::size_t j = 0; j < p; ++j) out.push_back("phi" + std::to_string(j + 1));
    out.push_back("theta");
    return out;
  }

  std::vector<double> pack(const ParamVector& g) const {
    std::vector<double> x;
    x.reserve(size());
    x.push_back(g.nu);
    x.push_back(g.alpha);
    x.insert(x.end(), g.beta.begin(), g.beta.end());
    x.insert(x.end(), g.phi.begin(), g.phi.end());
    x.push_back(g.theta);
    return x;
  }

  ParamVector unpack(const std::vector<double>& x, double u0) const {
    ParamVector g;
    g.nu = x[nu()];
    g.alpha = x[alpha()];
    g.beta.assign(x.begin() + 2, x.begin() + 2 + static_cast<std::ptrdiff_t>(l));
    g.phi.assign(x.begin() + 2 + static_cast<std::ptrdiff_t>(l),
                 x.begin() + 2 + static_cast<std::ptrdiff_t>(l + p));
    g.theta = x[theta()];
    g.u0 = u0;
    return g;
  }
};

/// Box for the packed parameter vector.
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static Bounds defaults(const ModelSpec& spec) {
    const ParamLayout layout(spec);
    Bounds b{std::vector<double>(layout.size(), -50.0), std::vector<double>(layout.size(), 50.0)};
    b.lower[ParamLayout::nu()] = 1e-3;
    b.upper[ParamLayout::nu()] = 1e4;
    double lo = 0.0, hi = 0.0;
    switch (spec.map.family()) {
      case MapFamily::Bernoulli:  // integer slope, never optimized
        lo = 2.0;
        hi = 1e6;
        break;
      case MapFamily::Logistic:
        lo = 1e-6;
        hi = 4.0 - 1e-6;
        break;
      case MapFamily::PiecewiseLinear:
      case MapFamily::MannevillePomeau:
        lo = 1e-6;
        hi = 1.0 - 1e-6;
        break;
    }
    b.lower[layout.theta()] = lo;
    b.upper[layout.theta()] = hi;
    return b;
  }
};

/// Coordinates optimized by default: everything except alpha in the pure
/// chaotic case and the integer slope of a Bernoulli map.
inline std::vector<bool> default_free(const ModelSpec& spec) {
  const ParamLayout layout(spec);
  std::vector<bool> free(layout.size(), true);
  if (spec.is_pure_chaotic()) free[ParamLayout::alpha()] = false;
  if (spec.map.family() == MapFamily::Bernoulli) free[layout.theta()] = false;
  return free;
}

/// Starting point: alpha = g(mean y) (0 for pure chaotic models), beta = 0,
/// phi = 0, theta = midpoint of its box when free, nu = 5.
inline ParamVector default_start(const ModelSpec& spec, const SeriesSample& sample, double u0,
                                 const Bounds& bounds, const std::vector<bool>& free) {
  const ParamLayout layout(spec);
  ParamVector g;
  g.nu = 5.0;
  double ybar = 0.0;
  for (double y : sample.y) ybar += y;
  ybar /= static_cast<double>(sample.y.size());
  g.alpha = spec.is_pure_chaotic() ? 0.0 : spec.g(ybar);
  g.beta.assign(spec.l, 0.0);
  g.phi.assign(spec.p, 0.0);
  const std::size_t ti = layout.theta();
  g.theta = free[ti] ? 0.5 * (bounds.lower[ti] + bounds.upper[ti]) : spec.map.theta();
  g.u0 = u0;
  return g;
}

/// Sum of conditional beta log-densities; -inf when any term is not finite.
inline double loglik(const ModelSpec& spec, const ParamVector& gamma, const SeriesSample& sample) {
  const std::vector<double> mu = conditional_means(spec, gamma, sample);
  double total = 0.0;
  for (std::size_t t = 0; t < mu.size(); ++t) total += log_density(BetaMP(mu[t], gamma.nu), sample.y[t]);
  return std::isfinite(total) ? total : -std::numeric_limits<double>::infinity();
}

struct InformationCriteria {
  double aic;
  double bic;
};

inline InformationCriteria information_criteria(double ll, std::size_t k, double n) {
  const auto kd = static_cast<double>(k);
  return {-2.0 * ll + 2.0 * kd, -2.0 * ll + kd * std::log(n)};
}

struct WaldResult {
  std::vector<double> se;        // packed layout; NaN where undefined or not estimated
  std::vector<double> p_values;  // two-sided z test of H0: coordinate = 0
  std::vector<bool> defined;
  bool singular = false;         // some estimated coordinate had no usable curvature
};

/// Standard errors from the central-difference Hessian of -loglik at
/// gamma_hat (step max(1e-4, 1e-4 |gamma_i|)) over the free coordinates.
/// Coordinates whose stencil leaves the box, or whose curvature vanishes, are
/// reported undefined.
inline WaldResult wald_inference(const ModelSpec& spec, const ParamVector& gamma_hat,
                                 const SeriesSample& sample, const std::vector<bool>& free,
                                 const Bounds& bounds) {
  const ParamLayout layout(spec);
  const std::size_t dim = layout.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  WaldResult out{std::vector<double>(dim, nan), std::vector<double>(dim, nan),
                 std::vector<bool>(dim, false), false};

  const std::vector<double> x0 = layout.pack(gamma_hat);
  auto negll = [&](const std::vector<double>& x) {
    try {
      return -loglik(spec, layout.unpack(x, gamma_hat.u0), sample);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::size_t> idx;
  std::vector<double> step;
  for (std::size_t i = 0; i < dim; ++i) {
    if (!free[i]) continue;
    const double h = std::max(1e-4, 1e-4 * std::abs(x0[i]));
    if (x0[i] - h < bounds.lower[i] || x0[i] + h > bounds.upper[i]) {
      out.singular = true;
      continue;
    }
    idx.push_back(i);
    step.push_back(h);
  }
  const std::size_t m = idx.size();
  if (m == 0) return out;

  const double f0 = negll(x0);
  Eigen::MatrixXd H(m, m);
  std::vector<double> x = x0;
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t i = idx[a];
    const double hi = step[a];
    x[i] = x0[i] + hi;
    const double fp = negll(x);
    x[i] = x0[i] - hi;
    const double fm = negll(x);
    x[i] = x0[i];
    H(a, a) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (std::size_t b = 0; b < a; ++b) {
      const std::size_t j = idx[b];
      const double hj = step[b];
      auto at = [&](double si, double sj) {
        x[i] = x0[i] + si * hi;
        x[j] = x0[j] + sj * hj;
        const double v = negll(x);
        x[i] = x0[i];
        x[j] = x0[j];
        return v;
      };
      const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
      H(a, b) = v;
      H(b, a) = v;
    }
  }

  // Drop coordinates with no curvature (flat directions), then invert the rest.
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < m; ++a) {
    if (std::isfinite(H(a, a)) && std::abs(H(a, a)) > 1e-10) keep.push_back(a);
    else out.singular = true;
  }
  if (keep.empty()) return out;
  Eigen::MatrixXd Hk(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b) Hk(a, b) = H(keep[a], keep[b]);
  if (!Hk.allFinite()) {
    out.singular = true;
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Hk);
  if (!lu.isInvertible()) {
    out.singular = true;
    return out;
  }
  const Eigen::MatrixXd cov = lu.inverse();
  for (std::size_t a = 0; a < keep.size(); ++a) {
    const std::size_t i = idx[keep[a]];
    const double var = cov(a, a);
    if (!(var > 0.0) || !std::isfinite(var)) {
      out.singular = true;
      continue;
    }
    out.se[i] = std::sqrt(var);
    out.p_values[i] = std::erfc(std::abs(x0[i] / out.se[i]) / std::numbers::sqrt2);
    out.defined[i] = true;
  }
  return out;
}

inline WaldResult wald_inference(const ModelSpec& spec, const ParamVector& gamma_hat,
                                 const SeriesSample& sample) {
  return wald_inference(spec, gamma_hat, sample, default_free(spec), Bounds::defaults(spec));
}

struct FitOptions {
  std::optional<std::vector<bool>> free;  // default_free(spec) when absent
  std::optional<ParamVector> start;       // fixed values and non-nu starting values
  double u0 = kU0GridLower;               // used when start is absent
  std::vector<double> nu_starts{5.0, 50.0, 100.0};
  bool two_stage = false;                 // quasi-Newton stage before Nelder-Mead
  NelderMeadOptions nelder_mead{};
  QuasiNewtonOptions quasi_newton{};
  std::optional<Bounds> bounds;
  bool wald = true;
};

struct FitResult {
  ParamVector gamma_hat;
  std::vector<std::string> names;
  std::vector<double> estimates;  // packed gamma_hat
  std::vector<bool> free;
  double loglik = -std::numeric_limits<double>::infinity();
  double aic = 0.0;
  double bic = 0.0;
  std::size_t k = 0;  // optimized coordinates (u0 excluded)
  std::size_t n = 0;
  std::vector<double> se;
  std::vector<double> p_values;
  std::vector<bool> se_defined;
  bool hessian_singular = false;
  std::vector<double> fitted;
  std::vector<double> residuals;  // y_t - mu_t
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<double> start_logliks;  // terminal loglik of each nu start
  std::vector<std::pair<double, double>> u0_grid_trace;
};

/// Maximizes the partial likelihood over the free coordinates. One bounded
/// Nelder-Mead run per nu start (optionally preceded by a quasi-Newton
/// stage, and by a theta-held run when theta is free); the best terminal
/// point is returned.
inline FitResult fit(const ModelSpec& spec, const SeriesSample& sample, const FitOptions& options = {}) {
  validate(spec, sample);
  if (sample.size() <= spec.p) throw DataError("sample must be longer than the AR order");
  const ParamLayout layout(spec);
  const Bounds bounds = options.bounds.value_or(Bounds::defaults(spec));
  const std::vector<bool> free = options.free.value_or(default_free(spec));
  if (free.size() != layout.size() || bounds.lower.size() != layout.size()) {
    throw DataError("free mask or bounds do not match the parameter layout");
  }
  const ParamVector start =
      options.start.value_or(default_start(spec, sample, options.u0, bounds, free));
  validate(spec, start);
  const double u0 = start.u0;

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (free[i]) idx.push_back(i);
  const std::vector<double> base = layout.pack(start);

  FitResult res;
  res.names = layout.names();
  res.free = free;
  res.n = sample.size();
  res.k = idx.size();

  // Bounded search over the coordinates `sub`, the rest held at `x`.
  struct Stage {
    std::vector<double> x;
    double value;
    bool converged;
  };
  auto search = [&](const std::vector<std::size_t>& sub, std::vector<double> x) -> Stage {
    std::vector<double> lo, hi, z0;
    for (std::size_t i : sub) {
      lo.push_back(bounds.lower[i]);
      hi.push_back(bounds.upper[i]);
      z0.push_back(std::clamp(x[i], bounds.lower[i], bounds.upper[i]));
    }
    const BoxTransform box(lo, hi);
    auto f = [&](const std::vector<double>& xs) {
      std::vector<double> full = x;
      for (std::size_t a = 0; a < sub.size(); ++a) full[sub[a]] = xs[a];
      try {
        return -loglik(spec, layout.unpack(full, u0), sample);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    if (options.two_stage) {
      const OptimResult qn = quasi_newton_bounded(f, z0, box, options.quasi_newton);
      res.evaluations += qn.evaluations;
      if (std::isfinite(qn.value)) z0 = qn.x;
    }
    const OptimResult nm = nelder_mead_bounded(f, z0, box, options.nelder_mead);
    res.evaluations += nm.evaluations;
    res.iterations += nm.iterations;
    for (std::size_t a = 0; a < sub.size(); ++a) x[sub[a]] = nm.x[a];
    return {x, nm.value, nm.converged};
  };

  std::vector<double> best_x = base;
  if (!idx.empty()) {
    // A chaotic map makes the likelihood rough in theta, and a joint simplex
    // then collapses onto its start. The other coordinates are settled first
    // with theta held, and theta is released from there.
    std::vector<std::size_t> without_theta;
    for (std::size_t i : idx)
      if (i != layout.theta()) without_theta.push_back(i);
    const bool staged = free[layout.theta()] && !without_theta.empty();

    const bool nu_free = free[ParamLayout::nu()];
    const std::vector<double> nu_starts = nu_free ? options.nu_starts : std::vector<double>{base[0]};
    double best = std::numeric_limits<double>::infinity();
    bool best_converged = false;
    for (double nu0 : nu_starts) {
      std::vector<double> x0 = base;
      if (nu_free) x0[ParamLayout::nu()] = nu0;
      if (staged) x0 = search(without_theta, x0).x;
      const Stage st = search(idx, x0);
      res.start_logliks.push_back(-st.value);
      if (st.value < best) {
        best = st.value;
        best_x = st.x;
        best_converged = st.converged;
      }
    }
    res.converged = best_converged && std::isfinite(best);
  } else {
    res.converged = true;
  }

  res.gamma_hat = layout.unpack(best_x, u0);
  res.estimates = best_x;
  res.loglik = loglik(spec, res.gamma_hat, sample);
  const auto ic = information_criteria(res.loglik, res.k, static_cast<double>(res.n));
  res.aic = ic.aic;
  res.bic = ic.bic;
  res.fitted = conditional_means(spec, res.gamma_hat, sample);
  res.residuals.resize(res.n);
  for (std::size_t t = 0; t < res.n; ++t) res.residuals[t] = sample.y[t] - res.fitted[t];

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (options.wald) {
    WaldResult w = wald_inference(spec, res.gamma_hat, sample, free, bounds);
    res.se = std::move(w.se);
    res.p_values = std::move(w.p_values);
    res.se_defined = std::move(w.defined);
    res.hessian_singular = w.singular;
  } else {
    res.se.assign(layout.size(), nan);
    res.p_values.assign(layout.size(), nan);
    res.se_defined.assign(layout.size(), false);
  }
  return res;
}

/// u0 value of grid point i out of grid_size on [pi/1000, 1 - pi/1000].
inline double u0_grid_point(std::size_t i, std::size_t grid_size) {
  if (grid_size <= 1) return kU0GridLower;
  return kU0GridLower + (kU0GridUpper - kU0GridLower) * static_cast<double>(i) /
                            static_cast<double>(grid_size - 1);
}

/// One fit per grid value of u0 (grid points may run concurrently).
inline std::vector<FitResult> fit_u0_grid_candidates(const ModelSpec& spec, const SeriesSample& sample,
                                                     const FitOptions& options, std::size_t grid_size = 900) {
  if (grid_size == 0) throw DomainError("u0 grid needs at least one point");
  validate(spec, sample);
  std::vector<FitResult> fits(grid_size);
  parallel_for(grid_size, [&](std::size_t i) {
    FitOptions o = options;
    const double u0 = u0_grid_point(i, grid_size);
    o.u0 = u0;
    if (o.start) o.start->u0 = u0;
    fits[i] = fit(spec, sample, o);
  });
  return fits;
}

/// Index of the highest-likelihood fit, ties to the lowest u0.
inline std::size_t best_by_loglik(const std::vector<FitResult>& fits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < fits.size(); ++i)
    if (fits[i].loglik > fits[best].loglik) best = i;
  return best;
}

inline std::vector<std::pair<double, double>> u0_trace(const std::vector<FitResult>& fits) {
  std::vector<std::pair<double, double>> trace;
  trace.reserve(fits.size());
  for (const auto& f : fits) trace.emplace_back(f.gamma_hat.u0, f.loglik);
  return trace;
}

inline FitResult fit_u0_grid(const ModelSpec& spec, const SeriesSample& sample, const FitOptions& options,
                             std::size_t grid_size = 900) {
  std::vector<FitResult> fits = fit_u0_grid_candidates(spec, sample, options, grid_size);
  auto trace = u0_trace(fits);
  FitResult best = std::move(fits[best_by_loglik(fits)]);
  best.u0_grid_trace = std::move(trace);
  return best;
}

}  // namespace betarc
