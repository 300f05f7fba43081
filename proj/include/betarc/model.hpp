#pragma once

// The beta autoregressive chaotic process.
//
// Systematic component, for t = 1..n:
//   g(mu_t) = alpha + x_t' beta + sum_{j=1}^{p} phi_j (g(y_{t-j}) - x_{t-j}' beta)
//             + h(T^{t-1}(u0))
// AR terms whose lag reaches before the first observation contribute zero.
// The pure chaotic case (p = 0, l = 0, identity links, alpha = 0) reduces to
// mu_t = T^{t-1}(u0).

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "betarc/betadist.hpp"
#include "betarc/dynamics.hpp"
#include "betarc/errors.hpp"
#include "betarc/links.hpp"

namespace betarc {

/// Dense row-major n x l covariate matrix.
struct Covariates {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Covariates() = default;
  Covariates(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct ModelSpec {
  LinkFn g;
  LinkFn h;
  MapSpec map{MapFamily::Bernoulli, 3.0};
  std::size_t p = 0;  // AR order
  std::size_t l = 0;  // covariate dimension

  bool is_pure_chaotic() const noexcept {
    return p == 0 && l == 0 && g.kind == LinkKind::Identity && h.kind == LinkKind::Identity;
  }

  static ModelSpec pure_chaotic(MapSpec m) { return ModelSpec{{}, {}, m, 0, 0}; }
};

/// gamma = (nu, alpha, beta', phi', theta)' plus the orbit seed u0.
struct ParamVector {
  double nu = 1.0;
  double alpha = 0.0;
  std::vector<double> beta;
  std::vector<double> phi;
  double theta = 3.0;
  double u0 = 0.5;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct SeriesSample {
  std::vector<double> y;
  std::optional<Covariates> X;
  std::vector<std::string> timestamps;

  std::size_t size() const noexcept { return y.size(); }
};

inline MapSpec map_of(const ModelSpec& spec, const ParamVector& gamma) {
  return MapSpec(spec.map.family(), gamma.theta);
}

inline void validate(const ModelSpec& spec, const ParamVector& gamma) {
  if (!(gamma.nu > 0.0) || !std::isfinite(gamma.nu)) throw DomainError("nu must be positive");
  if (!(gamma.u0 > 0.0 && gamma.u0 < 1.0)) throw DomainError("u0 must lie in (0,1)");
  if (gamma.beta.size() != spec.l) throw DataError("beta length does not match covariate dimension");
  if (gamma.phi.size() != spec.p) throw DataError("phi length does not match AR order");
  (void)map_of(spec, gamma);
}

inline void validate(const ModelSpec& spec, const SeriesSample& sample) {
  if (sample.y.empty()) throw DataError("empty sample");
  for (std::size_t t = 0; t < sample.y.size(); ++t) {
    if (!(sample.y[t] > 0.0 && sample.y[t] < 1.0)) {
      throw DataError("observation " + std::to_string(t + 1) + " outside (0,1)");
    }
  }
  if (spec.l > 0) {
    if (!sample.X) throw DataError("model has covariates but sample has none");
    if (sample.X->cols != spec.l) throw DataError("covariate column count mismatch");
    if (sample.X->rows != sample.y.size()) throw DataError("covariate row count mismatch");
  }
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// eta_t for zero-based t. `g_history[s]` holds g(y_s) (or its forecast
/// substitute) for every s < t; X rows must exist for t and its lags.
inline double linear_predictor(const ModelSpec& spec, const ParamVector& gamma, std::size_t t,
                               std::span<const double> g_history, const Covariates* X,
                               double orbit_value) {
  double eta = gamma.alpha;
  if (spec.l > 0) eta += dot(X->row(t), gamma.beta);
  for (std::size_t j = 1; j <= spec.p && j <= t; ++j) {
    const std::size_t s = t - j;
    double term = g_history[s];
    if (spec.l > 0) term -= dot(X->row(s), gamma.beta);
    eta += gamma.phi[j - 1] * term;
  }
  return eta + spec.h(orbit_value);
}

}  // namespace detail

/// Linear predictors eta_1..eta_n for an observed sample.
inline std::vector<double> linear_predictors(const ModelSpec& spec, const ParamVector& gamma,
                                             const SeriesSample& sample) {
  validate(spec, gamma);
  validate(spec, sample);
  const std::size_t n = sample.size();
  const Orbit orbit = iterate(map_of(spec, gamma), gamma.u0, n);
  std::vector<double> g_history(n);
  for (std::size_t t = 0; t < n; ++t) g_history[t] = spec.g(sample.y[t]);
  const Covariates* X = sample.X ? &*sample.X : nullptr;
  std::vector<double> eta(n);
  for (std::size_t t = 0; t < n; ++t) {
    eta[t] = detail::linear_predictor(spec, gamma, t, g_history, X, orbit.values[t]);
  }
  return eta;
}

inline std::vector<double> conditional_means(const ModelSpec& spec, const ParamVector& gamma,
                                             const SeriesSample& sample) {
  std::vector<double> mu = linear_predictors(spec, gamma, sample);
  for (double& m : mu) m = clamp_unit(spec.g.inverse(m));
  return mu;
}

struct SimulationResult {
  SeriesSample sample;
  std::vector<double> mu;
};

/// Sequential generation: mu_t uses the already drawn y_{t-j}, then
/// y_t ~ Beta(nu mu_t, nu (1 - mu_t)).
template <class Rng>
SimulationResult simulate(const ModelSpec& spec, const ParamVector& gamma, std::size_t n, Rng& rng,
                          std::optional<Covariates> X = std::nullopt) {
  validate(spec, gamma);
  if (n == 0) throw DomainError("simulate needs n >= 1");
  if (spec.l > 0 && (!X || X->rows < n || X->cols != spec.l)) {
    throw DataError("simulation needs n x l covariates");
  }
  const Orbit orbit = iterate(map_of(spec, gamma), gamma.u0, n);
  SimulationResult out;
  out.sample.y.reserve(n);
  out.mu.reserve(n);
  std::vector<double> g_history;
  g_history.reserve(n);
  const Covariates* Xp = X ? &*X : nullptr;
  for (std::size_t t = 0; t < n; ++t) {
    const double eta = detail::linear_predictor(spec, gamma, t, g_history, Xp, orbit.values[t]);
    const double mu = clamp_unit(spec.g.inverse(eta));
    const double y = sample(BetaMP(mu, gamma.nu), rng);
    out.mu.push_back(mu);
    out.sample.y.push_back(y);
    g_history.push_back(spec.g(y));
  }
  if (X) {
    X->rows = n;
    X->data.resize(n * X->cols);
    out.sample.X = std::move(X);
  }
  return out;
}

struct UnconditionalMoments {
  double mean = 0.0;
  double variance = 0.0;        // Var(mu) + E[mu (1 - mu)] / (1 + nu)
  double orbit_variance = 0.0;  // Var(mu)
  std::vector<double> autocovariance;  // lags 0..max_lag of mu (= of Y for lags >= 1)
};

/// Orbit (Birkhoff) estimates of the unconditional mean, variance and
/// autocovariances of a pure chaotic process.
inline UnconditionalMoments unconditional_moments(const ModelSpec& spec, const ParamVector& gamma,
                                                  std::size_t n, std::size_t max_lag) {
  if (!spec.is_pure_chaotic()) throw DomainError("unconditional moments need a pure chaotic model");
  validate(spec, gamma);
  if (n < 10 * std::max<std::size_t>(max_lag, 1)) throw DomainError("orbit too short for requested lags");
  const Orbit orbit = iterate(map_of(spec, gamma), gamma.u0, n);
  const auto& x = orbit.values;
  const double dn = static_cast<double>(n);
  UnconditionalMoments m;
  double sum = 0.0, spread = 0.0;
  for (double v : x) {
    const double mu = clamp_unit(gamma.alpha + v);
    sum += mu;
    spread += mu * (1.0 - mu);
  }
  m.mean = sum / dn;
  std::vector<double> centred(n);
  for (std::size_t t = 0; t < n; ++t) centred[t] = clamp_unit(gamma.alpha + x[t]) - m.mean;
  m.autocovariance.assign(max_lag + 1, 0.0);
  for (std::size_t h = 0; h <= max_lag; ++h) {
    double acc = 0.0;
    for (std::size_t t = 0; t + h < n; ++t) acc += centred[t] * centred[t + h];
    m.autocovariance[h] = acc / dn;
  }
  m.orbit_variance = m.autocovariance[0];
  m.variance = m.orbit_variance + (spread / dn) / (1.0 + gamma.nu);
  return m;
}

enum class DensityMethod { Quadrature, OrbitMC };

/// f_Y(y) = integral of the conditional beta density against the invariant
/// law of the map, either by quadrature against the closed-form ACIM or as a
/// Birkhoff average along the orbit of u0.
inline double unconditional_density(const ModelSpec& spec, const ParamVector& gamma, double y,
                                    DensityMethod method, std::size_t n = 1'000'000) {
  if (!spec.is_pure_chaotic()) throw DomainError("unconditional density needs a pure chaotic model");
  validate(spec, gamma);
  if (!(y > 0.0 && y < 1.0)) throw DomainError("density argument outside (0,1)");
  const MapSpec m = map_of(spec, gamma);
  auto conditional = [&](double z) {
    return density(BetaMP(clamp_unit(gamma.alpha + z), gamma.nu), y);
  };
  if (method == DensityMethod::Quadrature) {
    if (!has_invariant_density(m)) {
      throw NumericalError("no closed-form invariant density for map " + std::string(to_string(m.family())));
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto integrand = [&](double z) { return conditional(z) * *invariant_density(m, z); };
    return integrator.integrate(integrand, kBoundaryEps, 1.0 - kBoundaryEps);
  }
  if (n == 0) throw DomainError("orbit length must be positive");
  return birkhoff_average(m, gamma.u0, n, conditional);
}

}  // namespace betarc
