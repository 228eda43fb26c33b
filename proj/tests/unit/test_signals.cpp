#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ecodrive/distribution.hpp"
#include "ecodrive/error.hpp"
#include "ecodrive/signals.hpp"
#include "truncated_gaussian.hpp"

using namespace ecodrive;

namespace {

SignalSpec make_signal(double offset, double red = 30.0) {
  SignalSpec s;
  s.position = 200.0;
  s.cycle_period = 60.0;
  s.base_red = red;
  s.clock_offset = offset;
  s.delay = DelayDistribution::moderate_traffic();
  return s;
}

}  // namespace

TEST(Signals, ClockTime) {
  EXPECT_DOUBLE_EQ(clock_time(make_signal(10.0), 55.0), 5.0);
  EXPECT_DOUBLE_EQ(clock_time(make_signal(0.0), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(clock_time(make_signal(30.0), 90.0), 0.0);
  for (double t = 0.0; t < 500.0; t += 0.37) {
    const double c = clock_time(make_signal(17.0), t);
    EXPECT_GE(c, 0.0);
    EXPECT_LT(c, 60.0);
  }
}

TEST(Signals, DeterministicGreen) {
  EXPECT_TRUE(is_green_deterministic(make_signal(10.0), 25.0));
  EXPECT_FALSE(is_green_deterministic(make_signal(0.0), 0.0));
  for (double t = 0.0; t < 120.0; t += 1.3) EXPECT_TRUE(is_green_deterministic(make_signal(3.0, 0.0), t));
}

TEST(Signals, EffectiveRed) {
  const SignalSpec s = make_signal(0.0);
  EXPECT_DOUBLE_EQ(effective_red(s, 0.0), 30.0);
  EXPECT_NEAR(effective_red(s, 1.0), 60.0, 1e-9);
  EXPECT_NEAR(effective_red(s, 0.5), 30.0 + oracle::moderate().quantile(0.5), 1e-6);
  SignalSpec bare = s;
  bare.delay.reset();
  EXPECT_THROW(effective_red(bare, 0.5), ConfigError);
  EXPECT_DOUBLE_EQ(gate_threshold(bare, 0.5), 30.0);
  EXPECT_DOUBLE_EQ(gate_threshold(s, 0.0), 30.0);
}

TEST(Signals, EffectiveRedIsMonotoneInEta) {
  const SignalSpec s = make_signal(0.0);
  double prev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = effective_red(s, i / 100.0);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(Signals, Violates) {
  const SignalSpec s = make_signal(0.0);
  EXPECT_FALSE(violates(s, 35.0, 0.0));
  EXPECT_TRUE(violates(s, 35.0, 10.0));
  EXPECT_FALSE(violates(s, 40.0, 10.0));
}

TEST(Distribution, MedianCrossCheckedBySampling) {
  const DelayDistribution d = DelayDistribution::moderate_traffic();
  const double median = d.inv_cdf(0.5);
  EXPECT_NEAR(median, oracle::moderate().quantile(0.5), 1e-6);
  Rng rng(7);
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = d.sample(rng);
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
  EXPECT_NEAR(xs[xs.size() / 2], median, 0.05);
}

TEST(Distribution, CdfMatchesClosedForm) {
  const DelayDistribution d = DelayDistribution::moderate_traffic();
  const oracle::TruncatedGaussian ref = oracle::moderate();
  EXPECT_EQ(d.cdf(0.0), 0.0);
  EXPECT_EQ(d.cdf(30.0), 1.0);
  EXPECT_EQ(d.cdf(-3.0), 0.0);
  EXPECT_EQ(d.cdf(31.0), 1.0);
  for (double x = 0.0; x <= 30.0; x += 0.25) EXPECT_NEAR(d.cdf(x), ref.cdf(x), 1e-12);
  EXPECT_NEAR(d.mean(), ref.expectation(), 1e-12);
}

TEST(Distribution, RoundTrips) {
  const DelayDistribution d = DelayDistribution::moderate_traffic();
  for (double x : {2.0, 6.0, 12.0, 25.0}) EXPECT_NEAR(d.inv_cdf(d.cdf(x)), x, 1e-6);
  for (int i = 0; i < 1000; ++i) {
    const double q = (i + 0.5) / 1000.0;
    EXPECT_NEAR(d.cdf(d.inv_cdf(q)), q, 1e-6);
  }
}

TEST(Distribution, InvalidParameters) {
  EXPECT_THROW(DelayDistribution::truncated_gaussian(6.0, 0.0, 0.0, 30.0), ConfigError);
  EXPECT_THROW(DelayDistribution::truncated_gaussian(6.0, 16.0, 5.0, 5.0), ConfigError);
  EXPECT_THROW(DelayDistribution::truncated_gaussian(6.0, 16.0, -1.0, 5.0), ConfigError);
  EXPECT_THROW(DelayDistribution::tabulated({{0.0, 0.0}, {1.0, 0.5}}), ConfigError);
  EXPECT_THROW(DelayDistribution::tabulated({{0.0, 0.0}, {0.0, 1.0}}), ConfigError);
}

TEST(Distribution, TabulatedIsPiecewiseLinear) {
  const DelayDistribution d = DelayDistribution::tabulated({{0.0, 0.0}, {10.0, 0.8}, {20.0, 1.0}});
  EXPECT_NEAR(d.cdf(5.0), 0.4, 1e-12);
  EXPECT_NEAR(d.cdf(15.0), 0.9, 1e-12);
  EXPECT_NEAR(d.inv_cdf(0.4), 5.0, 1e-9);
  EXPECT_NEAR(d.inv_cdf(0.9), 15.0, 1e-9);
  EXPECT_NEAR(d.mean(), 0.8 * 5.0 + 0.2 * 15.0, 1e-9);
}

TEST(Distribution, TabulatedCsv) {
  const auto path = std::filesystem::temp_directory_path() / "ecodrive_delay.csv";
  {
    std::ofstream out(path);
    out << "delay_s,cdf\n0,0\n10,0.8\n20,1\n";
  }
  const DelayDistribution d = DelayDistribution::load_tabulated_csv(path);
  EXPECT_NEAR(d.cdf(5.0), 0.4, 1e-12);
  std::filesystem::remove(path);
}

TEST(Distribution, SamplingIsReproducibleAndInSupport) {
  const DelayDistribution d = DelayDistribution::heavy_traffic();
  EXPECT_EQ(d.sample(std::uint64_t{42}), d.sample(std::uint64_t{42}));
  Rng rng(derive_seed(5, 3));
  for (int i = 0; i < 10000; ++i) {
    const double x = d.sample(rng);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 30.0);
  }
  EXPECT_NE(derive_seed(5, 3), derive_seed(5, 4));
  EXPECT_NE(derive_seed(5, 3), derive_seed(6, 3));
}

TEST(Distribution, PresetsOrderedByTraffic) {
  EXPECT_LT(DelayDistribution::light_traffic().mean(), DelayDistribution::moderate_traffic().mean());
  EXPECT_LT(DelayDistribution::moderate_traffic().mean(), DelayDistribution::heavy_traffic().mean());
}
