#pragma once

// Parametric interval maps on [0,1], orbits, Birkhoff averages and
// invariant densities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "betarc/errors.hpp"

namespace betarc {

/// Orbit values and conditional means are kept inside [eps, 1 - eps].
inline constexpr double kBoundaryEps = 1e-12;

inline double clamp_unit(double x) noexcept {
  return std::clamp(x, kBoundaryEps, 1.0 - kBoundaryEps);
}

enum class MapFamily { Bernoulli, Logistic, PiecewiseLinear, MannevillePomeau };

inline std::string_view to_string(MapFamily f) noexcept {
  switch (f) {
    case MapFamily::Bernoulli: return "bernoulli";
    case MapFamily::Logistic: return "logistic";
    case MapFamily::PiecewiseLinear: return "pwl";
    case MapFamily::MannevillePomeau: return "mp";
  }
  return "?";
}

inline MapFamily parse_map_family(std::string_view name) {
  if (name == "bernoulli") return MapFamily::Bernoulli;
  if (name == "logistic") return MapFamily::Logistic;
  if (name == "pwl" || name == "piecewise") return MapFamily::PiecewiseLinear;
  if (name == "mp" || name == "manneville-pomeau") return MapFamily::MannevillePomeau;
  throw DomainError("unknown map family '" + std::string(name) + "'");
}

/// Closed interval of admissible parameter values (open ends flagged).
struct ParameterDomain {
  double lower;
  double upper;
  bool lower_open;
  bool upper_open;

  bool contains(double v) const noexcept {
    const bool lo = lower_open ? v > lower : v >= lower;
    const bool hi = upper_open ? v < upper : v <= upper;
    return lo && hi;
  }
};

inline ParameterDomain parameter_domain(MapFamily f) noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (f) {
    case MapFamily::Bernoulli: return {2.0, inf, false, true};
    case MapFamily::Logistic: return {0.0, 4.0, true, false};
    case MapFamily::PiecewiseLinear: return {0.0, 1.0, true, true};
    case MapFamily::MannevillePomeau: return {0.0, inf, true, true};
  }
  return {0.0, 0.0, true, true};
}

/// A member of one of the supported map families. Every family carries a
/// single parameter: the integer slope k (Bernoulli), theta (logistic and
/// piecewise linear) or the exponent s (Manneville-Pomeau).
class MapSpec {
 public:
  MapSpec(MapFamily family, double theta) : family_(family), theta_(theta) {
    if (!std::isfinite(theta) || !parameter_domain(family).contains(theta)) {
      throw DomainError("map parameter " + std::to_string(theta) + " invalid for family " +
                        std::string(to_string(family)));
    }
    if (family == MapFamily::Bernoulli && theta != std::floor(theta)) {
      throw DomainError("Bernoulli map requires an integer k >= 2");
    }
  }

  MapFamily family() const noexcept { return family_; }
  double theta() const noexcept { return theta_; }

  /// T(x) for x in [0,1], formulas evaluated in their printed order.
  double operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw DomainError("map argument " + std::to_string(x) + " outside [0,1]");
    }
    return apply_unchecked(x);
  }

  double apply_unchecked(double x) const noexcept {
    switch (family_) {
      case MapFamily::Bernoulli: return mod1(theta_ * x);
      case MapFamily::Logistic: return theta_ * x * (1.0 - x);
      case MapFamily::PiecewiseLinear:
        return x < theta_ ? x / theta_ : theta_ * (x - theta_) / (1.0 - theta_);
      case MapFamily::MannevillePomeau: return mod1(x + std::pow(x, 1.0 + theta_));
    }
    return x;
  }

  friend bool operator==(const MapSpec&, const MapSpec&) = default;

 private:
  static double mod1(double v) noexcept { return v - std::floor(v); }

  MapFamily family_;
  double theta_;
};

/// Free-function form of MapSpec::operator().
inline double apply_map(const MapSpec& m, double x) { return m(x); }

struct Orbit {
  double u0 = 0.0;
  std::vector<double> values;
  std::size_t clamped_count = 0;
};

/// values[0] = u0 and values[t+1] = clamp(T(values[t])); every clamp is counted.
inline Orbit iterate(const MapSpec& m, double u0, std::size_t n) {
  if (!(u0 > 0.0 && u0 < 1.0)) throw DomainError("u0 must lie in (0,1)");
  Orbit orbit;
  orbit.u0 = u0;
  orbit.values.reserve(n);
  double x = u0;
  for (std::size_t t = 0; t < n; ++t) {
    const double c = clamp_unit(x);
    if (c != x) ++orbit.clamped_count;
    orbit.values.push_back(c);
    x = m.apply_unchecked(c);
  }
  return orbit;
}

/// (1/n) * sum_{k<n} f(T^k(u0)), along the clamped orbit.
template <class F>
double birkhoff_average(const MapSpec& m, double u0, std::size_t n, F&& f) {
  if (n == 0) throw DomainError("birkhoff_average needs n >= 1");
  if (!(u0 > 0.0 && u0 < 1.0)) throw DomainError("u0 must lie in (0,1)");
  double sum = 0.0;
  double x = clamp_unit(u0);
  for (std::size_t k = 0; k < n; ++k) {
    sum += f(x);
    x = clamp_unit(m.apply_unchecked(x));
  }
  return sum / static_cast<double>(n);
}

/// Closed-form ACIM density when one is known: Lebesgue for Bernoulli maps,
/// the arcsine law for the logistic map at theta = 4. Otherwise nullopt.
inline std::optional<double> invariant_density(const MapSpec& m, double x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("density argument outside (0,1)");
  switch (m.family()) {
    case MapFamily::Bernoulli: return 1.0;
    case MapFamily::Logistic:
      if (m.theta() == 4.0) return 1.0 / (std::numbers::pi * std::sqrt(x * (1.0 - x)));
      return std::nullopt;
    default: return std::nullopt;
  }
}

inline bool has_invariant_density(const MapSpec& m) noexcept {
  return m.family() == MapFamily::Bernoulli ||
         (m.family() == MapFamily::Logistic && m.theta() == 4.0);
}

struct Histogram {
  std::vector<double> edges;   // bins + 1 equally spaced edges on [0,1]
  std::vector<double> masses;  // sums to 1
};

/// Normalized histogram of the first n orbit points on equal-width bins.
inline Histogram empirical_density(const MapSpec& m, double u0, std::size_t n, std::size_t bins) {
  if (bins == 0 || n < bins) throw DomainError("empirical_density needs n >= bins >= 1");
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = static_cast<double>(i) / bins;
  std::vector<std::size_t> counts(bins, 0);
  const Orbit orbit = iterate(m, u0, n);
  for (double v : orbit.values) {
    auto idx = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++counts[std::min(idx, bins - 1)];
  }
  h.masses.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.masses[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return h;
}

}  // namespace betarc
