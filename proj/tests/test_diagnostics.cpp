#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "betarc/diagnostics.hpp"
#include "betarc/rng.hpp"

using namespace betarc;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = standard_normal(rng);
  return v;
}

Candidate make(double mape, double ll, double aic, double lb_p, double alpha_p) {
  Candidate c;
  c.in_sample.mape = mape;
  c.fit.loglik = ll;
  c.fit.aic = aic;
  c.ljung_box.p_value = lb_p;
  c.fit.free = {true, true, true, true};  // nu, alpha, phi1, theta
  c.fit.se_defined = {true, true, true, true};
  c.fit.p_values = {0.0, alpha_p, 0.001, 0.5};
  return c;
}

}  // namespace

TEST(LjungBox, StatsmodelsReference) {
  std::vector<double> r;
  for (int i = 1; i <= 60; ++i) r.push_back(std::sin(1.3 * i) + 0.5 * std::cos(0.7 * i * i));
  const auto q5 = ljung_box(r, 5);
  EXPECT_NEAR(q5.statistic, 75.86658362231633, 1e-9);
  EXPECT_NEAR(q5.p_value, 6.133843908024828e-15, 1e-20);
  const auto q20 = ljung_box(r, 20);
  EXPECT_NEAR(q20.statistic, 258.7422083729405, 1e-8);
  EXPECT_EQ(q20.dof, 20u);
  EXPECT_EQ(q20.lags, 20u);
}

TEST(LjungBox, Errors) {
  EXPECT_THROW(ljung_box(std::vector<double>(30, 0.2), 5), NumericalError);
  EXPECT_THROW(ljung_box(white_noise(20, 1), 20), DomainError);
  EXPECT_THROW(ljung_box(white_noise(20, 1), 0), DomainError);
}

TEST(LjungBox, SignFlipInvariance) {
  auto r = white_noise(190, 4);
  const auto a = ljung_box(r);
  for (double& v : r) v = -v;
  const auto b = ljung_box(r);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-12);
  EXPECT_GE(a.statistic, 0.0);
  EXPECT_GE(a.p_value, 0.0);
  EXPECT_LE(a.p_value, 1.0);
}

TEST(LjungBox, PowerAgainstAutoregression) {
  int detected = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    CounterRng rng(derive_stream_key(55, 0, s));
    std::vector<double> x(190);
    double prev = 0.0;
    for (double& v : x) {
      v = 0.5 * prev + standard_normal(rng);
      prev = v;
    }
    detected += ljung_box(x).p_value < 0.01;
  }
  EXPECT_GE(detected, 990);
}

TEST(Accuracy, PerfectPrediction) {
  const std::vector<double> y{0.2, 0.4, 0.9};
  const auto r = accuracy(y, y);
  EXPECT_EQ(r.me, 0.0);
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.rmse, 0.0);
  EXPECT_EQ(r.mpe, 0.0);
  EXPECT_EQ(r.mape, 0.0);
}

TEST(Accuracy, HandArithmetic) {
  const auto r = accuracy({0.5, 0.5}, {0.4, 0.6}, Horizon::OutOfSample);
  EXPECT_NEAR(r.me, 0.0, 1e-15);
  EXPECT_NEAR(r.mae, 0.1, 1e-15);
  EXPECT_NEAR(r.rmse, 0.1, 1e-15);
  EXPECT_NEAR(r.mpe, 0.0, 1e-13);
  EXPECT_NEAR(r.mape, 20.0, 1e-13);
  EXPECT_EQ(r.horizon, Horizon::OutOfSample);
}

TEST(Accuracy, Errors) {
  EXPECT_THROW(accuracy({}, {}), DataError);
  EXPECT_THROW(accuracy({0.1, 0.2}, {0.1}), DataError);
  EXPECT_THROW(accuracy({0.0, 0.2}, {0.1, 0.2}), DomainError);
}

TEST(Accuracy, TranslationAndJensen) {
  CounterRng rng(6);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(25), p(25), a2(25), p2(25);
    const double d = 0.3 * uniform01(rng);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = 0.05 + 0.6 * uniform01(rng);
      p[i] = 0.05 + 0.6 * uniform01(rng);
      a2[i] = a[i] + d;
      p2[i] = p[i] + d;
    }
    const auto r = accuracy(a, p);
    const auto s = accuracy(a2, p2);
    ASSERT_NEAR(r.me, s.me, 1e-12);
    ASSERT_NEAR(r.mae, s.mae, 1e-12);
    ASSERT_NEAR(r.rmse, s.rmse, 1e-12);
    ASSERT_GE(r.rmse, std::abs(r.me));
    ASSERT_GE(r.mae, std::abs(r.me));
  }
}

TEST(Forecast, PureChaoticContinuesOrbit) {
  const MapSpec map(MapFamily::MannevillePomeau, 0.4);
  const ModelSpec spec = ModelSpec::pure_chaotic(map);
  ParamVector g;
  g.nu = 20.0;
  g.theta = 0.4;
  g.u0 = 0.61;
  CounterRng rng(1);
  const SeriesSample s = simulate(spec, g, 50, rng).sample;
  const auto f = forecast(spec, g, s, 7);
  const Orbit o = iterate(map, g.u0, 57);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(f[k], o.values[50 + k]);

  // fitted means over the sample followed by forecasts equal the means of the longer index range
  SeriesSample longer = s;
  for (double v : f) longer.y.push_back(v);
  const auto mu = conditional_means(spec, g, longer);
  const auto fitted = conditional_means(spec, g, s);
  for (std::size_t t = 0; t < 50; ++t) EXPECT_NEAR(mu[t], fitted[t], 1e-12);
  for (std::size_t k = 0; k < 7; ++k) EXPECT_NEAR(mu[50 + k], f[k], 1e-12);
}

TEST(Forecast, UnitRootGivesFlatForecast) {
  ModelSpec spec;
  spec.map = MapSpec(MapFamily::Bernoulli, 2);
  spec.p = 1;
  ParamVector g;
  g.nu = 10.0;
  g.phi = {1.0};
  g.theta = 2.0;
  g.u0 = 0.5;  // orbit hits 0, is clamped to eps and doubles from there
  SeriesSample s;
  s.y = {0.4, 0.45, 0.52, 0.61};
  const auto f = forecast(spec, g, s, 5);
  // x_5 = 8 eps, so the forecast drifts by 8 eps (2^(k+1) - 1)
  for (std::size_t k = 0; k < f.size(); ++k) {
    EXPECT_NEAR(f[k], 0.61 + 8e-12 * (std::ldexp(1.0, static_cast<int>(k) + 1) - 1.0), 1e-15);
  }
}

TEST(Forecast, NeedsFutureCovariates) {
  ModelSpec spec;
  spec.l = 1;
  ParamVector g;
  g.nu = 10.0;
  g.beta = {0.1};
  g.u0 = 0.3;
  SeriesSample s;
  s.y = {0.3, 0.4};
  s.X = Covariates(2, 1);
  EXPECT_THROW(forecast(spec, g, s, 3), DataError);
  EXPECT_THROW(forecast(spec, g, s, 3, Covariates(2, 1)), DataError);
  EXPECT_EQ(forecast(spec, g, s, 3, Covariates(3, 1)).size(), 3u);
  EXPECT_THROW(forecast(spec, g, s, 0, Covariates(3, 1)), DomainError);
}

TEST(ModelSelect, SingleCandidateWinsBoth) {
  const ParamLayout layout(ModelSpec{{}, {}, MapSpec(MapFamily::MannevillePomeau, 0.5), 1, 0});
  const auto sel = model_select({make(14.0, 120.0, -232.0, 0.5, 0.001)}, layout);
  EXPECT_EQ(sel.best_by_mape_in, 0u);
  EXPECT_EQ(sel.best_by_loglik, 0u);
}

TEST(ModelSelect, PicksByMapeAndByLikelihood) {
  const ParamLayout layout(ModelSpec{{}, {}, MapSpec(MapFamily::MannevillePomeau, 0.5), 1, 0});
  const std::vector<Candidate> c{make(14.16, 120.01, -232.03, 0.4, 1e-5), make(14.67, 134.70, -261.40, 0.3, 1e-5)};
  const auto sel = model_select(c, layout);
  EXPECT_EQ(sel.best_by_mape_in, 0u);
  EXPECT_EQ(sel.best_by_loglik, 1u);
}

TEST(ModelSelect, FiltersBeforeSelecting) {
  const ParamLayout layout(ModelSpec{{}, {}, MapSpec(MapFamily::MannevillePomeau, 0.5), 1, 0});
  const std::vector<Candidate> c{make(10.0, 200.0, -300.0, 0.01, 1e-5),  // Ljung-Box rejects
                                 make(11.0, 190.0, -290.0, 0.5, 0.2),    // alpha not significant
                                 make(15.0, 100.0, -190.0, 0.5, 1e-5)};
  const auto sel = model_select(c, layout);
  EXPECT_EQ(sel.admissible, std::vector<std::size_t>{2});
  EXPECT_EQ(sel.best_by_mape_in, 2u);
  EXPECT_EQ(sel.best_by_loglik, 2u);
  EXPECT_THROW(model_select({c[0], c[1]}, layout), NumericalError);
}

TEST(ModelSelect, TiesGoToSmallerAic) {
  const ParamLayout layout(ModelSpec{{}, {}, MapSpec(MapFamily::MannevillePomeau, 0.5), 1, 0});
  const std::vector<Candidate> c{make(12.0, 150.0, -290.0, 0.5, 1e-5), make(12.0, 150.0, -295.0, 0.5, 1e-5)};
  const auto sel = model_select(c, layout);
  EXPECT_EQ(sel.best_by_mape_in, 1u);
  EXPECT_EQ(sel.best_by_loglik, 1u);
}

TEST(ModelSelect, UndefinedStandardErrorIsNotSignificant) {
  const ParamLayout layout(ModelSpec{{}, {}, MapSpec(MapFamily::MannevillePomeau, 0.5), 1, 0});
  Candidate c = make(12.0, 150.0, -290.0, 0.5, 1e-5);
  c.fit.se_defined[2] = false;
  EXPECT_FALSE(admissible(c, layout));
  c.fit.se_defined[2] = true;
  c.fit.se_defined[3] = false;  // theta is not part of the filter
  EXPECT_TRUE(admissible(c, layout));
}
