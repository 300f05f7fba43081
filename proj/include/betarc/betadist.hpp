#pragma once

// Beta law in the mean-precision parameterization:
//   Beta(nu * mu, nu * (1 - mu)),  E = mu,  Var = mu (1 - mu) / (1 + nu).

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "betarc/errors.hpp"
#include "betarc/rng.hpp"

namespace betarc {

namespace detail {

using FastPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>,
                                                 boost::math::policies::overflow_error<boost::math::policies::ignore_error>>;

inline double log_gamma(double x) { return boost::math::lgamma(x, FastPolicy{}); }

/// log of a Gamma(shape, 1) variate (Marsaglia-Tsang). Shapes below one use
/// G(a) = G(a + 1) * U^(1/a), carried out in log space so tiny shapes do not
/// underflow.
template <class Rng>
double log_gamma_variate(double shape, Rng& rng) {
  const bool boosted = shape < 1.0;
  const double a = boosted ? shape + 1.0 : shape;
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  double v = 0.0;
  for (;;) {
    double z = 0.0;
    do {
      z = standard_normal(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    if (u < 1.0 - 0.0331 * z * z * z * z) break;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) break;
  }
  double result = std::log(d * v);
  if (boosted) result += std::log(uniform01(rng)) / shape;
  return result;
}

}  // namespace detail

class BetaMP {
 public:
  BetaMP(double mu, double nu) : mu_(mu), nu_(nu) {
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("beta mean must lie in (0,1), got " + std::to_string(mu));
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("beta precision must be positive, got " + std::to_string(nu));
  }

  double mu() const noexcept { return mu_; }
  double nu() const noexcept { return nu_; }
  double shape_a() const noexcept { return nu_ * mu_; }
  double shape_b() const noexcept { return nu_ * (1.0 - mu_); }

 private:
  double mu_;
  double nu_;
};

inline double log_density(const BetaMP& d, double y) {
  if (!(y > 0.0 && y < 1.0)) throw DomainError("beta density argument outside (0,1)");
  const double a = d.shape_a();
  const double b = d.shape_b();
  return detail::log_gamma(d.nu()) - detail::log_gamma(a) - detail::log_gamma(b) +
         (a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y);
}

inline double density(const BetaMP& d, double y) { return std::exp(log_density(d, y)); }

/// Draw from the law as G_a / (G_a + G_b). Results are pushed inside (0,1)
/// when the ratio rounds to an endpoint.
template <class Rng>
double sample(const BetaMP& d, Rng& rng) {
  const double la = detail::log_gamma_variate(d.shape_a(), rng);
  const double lb = detail::log_gamma_variate(d.shape_b(), rng);
  double y = 1.0 / (1.0 + std::exp(lb - la));
  if (y <= 0.0) y = std::numeric_limits<double>::min();
  if (y >= 1.0) y = std::nextafter(1.0, 0.0);
  return y;
}

inline double conditional_variance(const BetaMP& d) noexcept {
  return d.mu() * (1.0 - d.mu()) / (1.0 + d.nu());
}

}  // namespace betarc
