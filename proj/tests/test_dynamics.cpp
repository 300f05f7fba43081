#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "betarc/dynamics.hpp"
#include "betarc/rng.hpp"

using namespace betarc;

TEST(MapSpec, RejectsParametersOutsideDomain) {
  EXPECT_THROW(MapSpec(MapFamily::Bernoulli, 1.0), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::Bernoulli, 3.5), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::Logistic, 0.0), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::Logistic, 4.0001), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::PiecewiseLinear, 1.0), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::PiecewiseLinear, 0.0), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::MannevillePomeau, 0.0), DomainError);
  EXPECT_THROW(MapSpec(MapFamily::MannevillePomeau, std::nan("")), DomainError);
  EXPECT_NO_THROW(MapSpec(MapFamily::Logistic, 4.0));
  EXPECT_NO_THROW(MapSpec(MapFamily::MannevillePomeau, 2.5));
}

TEST(MapSpec, ParsesFamilyNames) {
  EXPECT_EQ(parse_map_family("bernoulli"), MapFamily::Bernoulli);
  EXPECT_EQ(parse_map_family("logistic"), MapFamily::Logistic);
  EXPECT_EQ(parse_map_family("pwl"), MapFamily::PiecewiseLinear);
  EXPECT_EQ(parse_map_family("mp"), MapFamily::MannevillePomeau);
  EXPECT_THROW(parse_map_family("tent"), DomainError);
  for (auto f : {MapFamily::Bernoulli, MapFamily::Logistic, MapFamily::PiecewiseLinear, MapFamily::MannevillePomeau})
    EXPECT_EQ(parse_map_family(to_string(f)), f);
}

TEST(ApplyMap, SpecExamples) {
  EXPECT_DOUBLE_EQ(apply_map(MapSpec(MapFamily::Bernoulli, 3), 0.1), 0.3);
  EXPECT_DOUBLE_EQ(apply_map(MapSpec(MapFamily::MannevillePomeau, 1.0), 0.5), 0.75);
  // second branch: 0.4 * (0.7 - 0.4) / (1 - 0.4)
  EXPECT_NEAR(apply_map(MapSpec(MapFamily::PiecewiseLinear, 0.4), 0.7), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(apply_map(MapSpec(MapFamily::PiecewiseLinear, 0.4), 0.2), 0.5);
  EXPECT_DOUBLE_EQ(apply_map(MapSpec(MapFamily::Logistic, 4.0), 0.5), 1.0);
}

TEST(ApplyMap, ModOneWrapsOneToZero) {
  EXPECT_EQ(apply_map(MapSpec(MapFamily::Bernoulli, 2), 0.5), 0.0);
  EXPECT_EQ(apply_map(MapSpec(MapFamily::Bernoulli, 3), 1.0), 0.0);
  EXPECT_EQ(apply_map(MapSpec(MapFamily::MannevillePomeau, 1.0), 1.0), 0.0);
}

TEST(ApplyMap, RejectsArgumentsOutsideUnitInterval) {
  const MapSpec m(MapFamily::Logistic, 3.7);
  EXPECT_THROW(m(-1e-9), DomainError);
  EXPECT_THROW(m(1.0 + 1e-9), DomainError);
  EXPECT_THROW(m(std::nan("")), DomainError);
}

TEST(ApplyMap, ImageStaysInUnitIntervalUnderFuzz) {
  const std::vector<MapSpec> maps{
      MapSpec(MapFamily::Bernoulli, 2),          MapSpec(MapFamily::Bernoulli, 7),
      MapSpec(MapFamily::Logistic, 0.5),         MapSpec(MapFamily::Logistic, 4.0),
      MapSpec(MapFamily::PiecewiseLinear, 1e-3), MapSpec(MapFamily::PiecewiseLinear, 0.999),
      MapSpec(MapFamily::MannevillePomeau, 0.1), MapSpec(MapFamily::MannevillePomeau, 3.0)};
  CounterRng rng(42);
  for (const auto& m : maps) {
    for (int i = 0; i < 100000; ++i) {
      const double x = i == 0 ? 0.0 : i == 1 ? 1.0 : uniform01(rng);
      const double v = m(x);
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Iterate, BernoulliDecadicOrbit) {
  const Orbit o = iterate(MapSpec(MapFamily::Bernoulli, 3), 0.1, 3);
  ASSERT_EQ(o.values.size(), 3u);
  EXPECT_DOUBLE_EQ(o.values[0], 0.1);
  EXPECT_DOUBLE_EQ(o.values[1], 0.3);
  EXPECT_NEAR(o.values[2], 0.9, 1e-15);
  EXPECT_EQ(o.clamped_count, 0u);
}

TEST(Iterate, ClampsBoundaryHitsAndCountsThem) {
  // 0.5 -> 0 under doubling; every later iterate starts from eps
  const Orbit o = iterate(MapSpec(MapFamily::Bernoulli, 2), 0.5, 4);
  EXPECT_EQ(o.values[1], kBoundaryEps);
  EXPECT_GE(o.clamped_count, 1u);
  for (double v : o.values) {
    EXPECT_GE(v, kBoundaryEps);
    EXPECT_LE(v, 1.0 - kBoundaryEps);
  }
}

TEST(Iterate, RecursionAndDeterminism) {
  const MapSpec m(MapFamily::MannevillePomeau, 0.75);
  const Orbit a = iterate(m, std::numbers::pi / 4, 5000);
  const Orbit b = iterate(m, std::numbers::pi / 4, 5000);
  EXPECT_EQ(a.values, b.values);
  for (std::size_t t = 0; t + 1 < a.values.size(); ++t) {
    ASSERT_EQ(a.values[t + 1], clamp_unit(m(a.values[t])));
  }
  EXPECT_THROW(iterate(m, 0.0, 3), DomainError);
  EXPECT_THROW(iterate(m, 1.0, 3), DomainError);
}

TEST(Iterate, LogisticPeriodTwoAttractor) {
  const Orbit o = iterate(MapSpec(MapFamily::Logistic, 10.0 / 3.0), std::numbers::pi / 3.2, 2000);
  std::vector<double> distinct;
  for (std::size_t t = 1000; t < o.values.size(); ++t) {
    bool seen = false;
    for (double d : distinct) seen = seen || std::abs(d - o.values[t]) < 1e-9;
    if (!seen) distinct.push_back(o.values[t]);
  }
  EXPECT_EQ(distinct.size(), 2u);
}

TEST(Iterate, MannevillePomeauLaminarPhases) {
  const Orbit o = iterate(MapSpec(MapFamily::MannevillePomeau, 0.75), std::numbers::pi / 4, 10000);
  std::size_t longest = 0, run = 0;
  for (double v : o.values) {
    run = v < 0.1 ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  EXPECT_GE(longest, 10u);
}

TEST(BirkhoffAverage, SingleTermIsFAtU0) {
  const MapSpec m(MapFamily::Logistic, 3.9);
  EXPECT_DOUBLE_EQ(birkhoff_average(m, 0.3, 1, [](double x) { return x * x; }), 0.09);
}

TEST(BirkhoffAverage, BernoulliMeanIsOneHalf) {
  const MapSpec m(MapFamily::Bernoulli, 3);
  EXPECT_NEAR(birkhoff_average(m, std::numbers::pi / 4, 1'000'000, [](double x) { return x; }), 0.5, 1e-2);
}

TEST(BirkhoffAverage, LogisticFullMeanIsOneHalf) {
  const MapSpec m(MapFamily::Logistic, 4.0);
  EXPECT_NEAR(birkhoff_average(m, std::numbers::pi / 4, 1'000'000, [](double x) { return x; }), 0.5, 1e-2);
}

TEST(BirkhoffAverage, BernoulliErrorShrinksWithLength) {
  const MapSpec m(MapFamily::Bernoulli, 3);
  std::vector<double> err;
  for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
    err.push_back(std::abs(birkhoff_average(m, std::numbers::pi / 4, n, [](double x) { return x; }) - 0.5));
  }
  // C / sqrt(n) envelope with C = 3 * sd(U) = 3 / sqrt(12)
  const double c = 3.0 / std::sqrt(12.0);
  const std::vector<double> ns{1e3, 1e4, 1e5, 1e6};
  for (std::size_t i = 0; i < err.size(); ++i) EXPECT_LE(err[i], c / std::sqrt(ns[i])) << "n=" << ns[i];
  EXPECT_LT(err.back(), err.front());
}

TEST(InvariantDensity, ClosedForms) {
  EXPECT_EQ(invariant_density(MapSpec(MapFamily::Bernoulli, 5), 0.37), 1.0);
  EXPECT_NEAR(*invariant_density(MapSpec(MapFamily::Logistic, 4.0), 0.5), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_FALSE(invariant_density(MapSpec(MapFamily::MannevillePomeau, 0.75), 0.3).has_value());
  EXPECT_FALSE(invariant_density(MapSpec(MapFamily::Logistic, 3.9), 0.3).has_value());
  EXPECT_FALSE(has_invariant_density(MapSpec(MapFamily::PiecewiseLinear, 0.4)));
}

TEST(InvariantDensity, ArcsineMatchesLongOrbitHistogram) {
  const MapSpec m(MapFamily::Logistic, 4.0);
  const std::size_t n = 1'000'000;
  // mass of [0.45, 0.55] under the arcsine law
  const double exact = 2.0 / std::numbers::pi * (std::asin(std::sqrt(0.55)) - std::asin(std::sqrt(0.45)));
  const double freq =
      birkhoff_average(m, std::numbers::pi / 4, n, [](double x) { return x >= 0.45 && x < 0.55 ? 1.0 : 0.0; });
  EXPECT_NEAR(freq, exact, 5e-3);
}

TEST(EmpiricalDensity, BernoulliIsUniform) {
  const Histogram h = empirical_density(MapSpec(MapFamily::Bernoulli, 3), std::numbers::pi / 4, 100000, 20);
  ASSERT_EQ(h.masses.size(), 20u);
  ASSERT_EQ(h.edges.size(), 21u);
  for (double m : h.masses) EXPECT_NEAR(m, 0.05, 0.01);
}

TEST(EmpiricalDensity, SingleBin) {
  const Histogram h = empirical_density(MapSpec(MapFamily::Logistic, 3.9), 0.3, 1, 1);
  ASSERT_EQ(h.masses.size(), 1u);
  EXPECT_EQ(h.masses[0], 1.0);
  EXPECT_THROW(empirical_density(MapSpec(MapFamily::Logistic, 3.9), 0.3, 3, 5), DomainError);
}

TEST(EmpiricalDensity, MassesFormDistribution) {
  for (const MapSpec& m : {MapSpec(MapFamily::Logistic, 3.8), MapSpec(MapFamily::PiecewiseLinear, 0.4),
                           MapSpec(MapFamily::MannevillePomeau, 0.3)}) {
    const Histogram h = empirical_density(m, 0.3141, 54321, 37);
    double total = 0.0;
    for (double v : h.masses) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(EmpiricalDensity, MannevillePomeauMassNearZero) {
  const Histogram h = empirical_density(MapSpec(MapFamily::MannevillePomeau, 0.75), std::numbers::pi / 4, 100000, 10);
  EXPECT_GT(h.masses[0], 0.2);  // uniform would give 0.1
  EXPECT_GT(h.masses[0], h.masses[9]);
}
