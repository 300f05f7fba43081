#pragma once

// Residual diagnostics, forecasting and accuracy measures.

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "betarc/errors.hpp"
#include "betarc/estimation.hpp"
#include "betarc/model.hpp"

namespace betarc {

struct LjungBoxResult {
  double statistic = 0.0;
  std::size_t lags = 0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Q = n (n + 2) sum_{k=1}^{m} r_k^2 / (n - k), referred to chi-square(m).
inline LjungBoxResult ljung_box(const std::vector<double>& residuals, std::size_t m = 20) {
  const std::size_t n = residuals.size();
  if (m == 0 || n <= m) throw DomainError("Ljung-Box needs more observations than lags");
  double mean = 0.0;
  for (double r : residuals) mean += r;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double r : residuals) c0 += (r - mean) * (r - mean);
  const auto [lo, hi] = std::minmax_element(residuals.begin(), residuals.end());
  if (!(*hi > *lo) || !(c0 > 0.0)) throw NumericalError("residuals have zero variance; autocorrelations undefined");
  const double dn = static_cast<double>(n);
  double q = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (residuals[t] - mean) * (residuals[t - k] - mean);
    const double rho = ck / c0;
    q += rho * rho / (dn - static_cast<double>(k));
  }
  q *= dn * (dn + 2.0);
  const boost::math::chi_squared chi(static_cast<double>(m));
  return {q, m, m, boost::math::cdf(boost::math::complement(chi, q))};
}

enum class Horizon { InSample, OutOfSample };

struct AccuracyReport {
  double mape = 0.0;  // percent
  double mpe = 0.0;   // percent
  double me = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  Horizon horizon = Horizon::InSample;
};

/// Errors are actual - predicted.
inline AccuracyReport accuracy(const std::vector<double>& actual, const std::vector<double>& predicted,
                               Horizon horizon = Horizon::InSample) {
  if (actual.empty() || actual.size() != predicted.size()) {
    throw DataError("accuracy needs two non-empty vectors of equal length");
  }
  AccuracyReport r;
  r.horizon = horizon;
  const double n = static_cast<double>(actual.size());
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (actual[t] == 0.0) throw DomainError("percentage errors undefined for a zero actual value");
    const double e = actual[t] - predicted[t];
    r.me += e;
    r.mae += std::abs(e);
    r.rmse += e * e;
    r.mpe += e / actual[t];
    r.mape += std::abs(e) / std::abs(actual[t]);
  }
  r.me /= n;
  r.mae /= n;
  r.rmse = std::sqrt(r.rmse / n);
  r.mpe *= 100.0 / n;
  r.mape *= 100.0 / n;
  return r;
}

/// Predicted means mu_{n+1..n+h}. The orbit is continued from u0; lags that
/// fall past the sample use the forecast linear predictor in place of g(y).
inline std::vector<double> forecast(const ModelSpec& spec, const ParamVector& gamma, const SeriesSample& sample,
                                    std::size_t h, const std::optional<Covariates>& X_future = std::nullopt) {
  validate(spec, gamma);
  validate(spec, sample);
  if (h == 0) throw DomainError("forecast horizon must be at least 1");
  const std::size_t n = sample.size();
  std::optional<Covariates> X;
  if (spec.l > 0) {
    if (!X_future || X_future->rows < h || X_future->cols != spec.l) {
      throw DataError("forecast needs covariates for every future step");
    }
    X = Covariates(n + h, spec.l);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < spec.l; ++j) (*X)(t, j) = (*sample.X)(t, j);
    for (std::size_t t = 0; t < h; ++t)
      for (std::size_t j = 0; j < spec.l; ++j) (*X)(n + t, j) = (*X_future)(t, j);
  }
  const Orbit orbit = iterate(map_of(spec, gamma), gamma.u0, n + h);
  std::vector<double> g_history;
  g_history.reserve(n + h);
  for (double y : sample.y) g_history.push_back(spec.g(y));
  const Covariates* Xp = X ? &*X : nullptr;
  std::vector<double> out;
  out.reserve(h);
  for (std::size_t t = n; t < n + h; ++t) {
    const double eta = detail::linear_predictor(spec, gamma, t, g_history, Xp, orbit.values[t]);
    out.push_back(clamp_unit(spec.g.inverse(eta)));
    g_history.push_back(eta);
  }
  return out;
}

inline std::vector<double> forecast(const ModelSpec& spec, const FitResult& fit, const SeriesSample& sample,
                                    std::size_t h, const std::optional<Covariates>& X_future = std::nullopt) {
  return forecast(spec, fit.gamma_hat, sample, h, X_future);
}

struct Candidate {
  FitResult fit;
  AccuracyReport in_sample;
  LjungBoxResult ljung_box;
};

struct Selection {
  std::size_t best_by_mape_in = 0;  // indices into the candidate list
  std::size_t best_by_loglik = 0;
  std::vector<std::size_t> admissible;
};

/// A candidate is admissible when every estimated regression coefficient
/// (alpha, beta, phi) is significant at `level` and the Ljung-Box test does
/// not reject at `level`.
inline bool admissible(const Candidate& c, const ParamLayout& layout, double level = 0.05) {
  if (!(c.ljung_box.p_value >= level)) return false;
  const auto& f = c.fit;
  for (std::size_t i = ParamLayout::alpha(); i < layout.theta(); ++i) {
    if (!f.free[i]) continue;
    if (!f.se_defined[i] || !(f.p_values[i] < level)) return false;
  }
  return true;
}

/// Smallest in-sample MAPE and highest likelihood among admissible
/// candidates; ties go to the smaller AIC.
inline Selection model_select(const std::vector<Candidate>& candidates, const ParamLayout& layout,
                              double level = 0.05) {
  Selection s;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (admissible(candidates[i], layout, level)) s.admissible.push_back(i);
  if (s.admissible.empty()) throw NumericalError("no candidate passes the significance and Ljung-Box filters");
  s.best_by_mape_in = s.best_by_loglik = s.admissible.front();
  for (std::size_t i : s.admissible) {
    const auto& c = candidates[i];
    const auto& bm = candidates[s.best_by_mape_in];
    if (c.in_sample.mape < bm.in_sample.mape ||
        (c.in_sample.mape == bm.in_sample.mape && c.fit.aic < bm.fit.aic)) {
      s.best_by_mape_in = i;
    }
    const auto& bl = candidates[s.best_by_loglik];
    if (c.fit.loglik > bl.fit.loglik || (c.fit.loglik == bl.fit.loglik && c.fit.aic < bl.fit.aic)) {
      s.best_by_loglik = i;
    }
  }
  return s;
}

/// Builds a candidate from a fit: in-sample accuracy of the fitted means and
/// Ljung-Box on the residuals.
inline Candidate make_candidate(FitResult fit, const SeriesSample& sample, std::size_t lb_lags = 20) {
  Candidate c;
  c.in_sample = accuracy(sample.y, fit.fitted, Horizon::InSample);
  c.ljung_box = ljung_box(fit.residuals, lb_lags);
  c.fit = std::move(fit);
  return c;
}

}  // namespace betarc
