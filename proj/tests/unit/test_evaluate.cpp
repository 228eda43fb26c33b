#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ecodrive/error.hpp"
#include "ecodrive/evaluate.hpp"
#include "ecodrive/scenario.hpp"
#include "truncated_gaussian.hpp"

using namespace ecodrive;

namespace {

Route one_signal_route(std::optional<DelayDistribution> law) {
  Route r;
  r.length = 400.0;
  r.deadline = 100.0;
  r.speed_min = PiecewiseConstant::constant(400.0, 0.0);
  r.speed_max = PiecewiseConstant::constant(400.0, 16.0);
  r.grade = PiecewiseConstant::constant(400.0, 0.0);
  SignalSpec s;
  s.position = 200.0;
  s.delay = std::move(law);
  r.signals.push_back(s);
  return r;
}

Trajectory plan_passing_at(double t) {
  Trajectory plan;
  plan.method = "op-fuel";
  plan.steps = {{0.0, 0.0, 0.0, 1, 0, 0, 0, 0}, {200.0, t, 10.0, 3, 50, 0, 200, 20}, {400.0, t + 20, 0.0, 3, 0, 0, 0, 10}};
  plan.passings.push_back({200.0, t, t, 30.0});
  return plan;
}

RunMetrics run(const std::string& label, double arrival, double bsfc_value, double fuel) {
  RunMetrics m;
  m.label = label;
  m.arrival_time = arrival;
  m.avg_bsfc = bsfc_value;
  m.total_fuel = fuel;
  return m;
}

}  // namespace

TEST(Metrics, ConstantPowerGivesPointwiseBsfc) {
  Trajectory t;
  t.method = "synthetic";
  t.steps.push_back({0.0, 0.0, 10.0, 3, 100.0, 0.0, 300.0, 0.0});
  for (int i = 1; i <= 10; ++i) t.steps.push_back({10.0 * i, 1.0 * i, 10.0, 3, 100.0, 0.0, 300.0, 4.0});
  const RunMetrics m = metrics(t);
  ASSERT_TRUE(m.avg_bsfc.has_value());
  EXPECT_NEAR(*m.avg_bsfc, *bsfc(100.0, 300.0, 4.0), 1e-9);
  EXPECT_NEAR(m.total_fuel, 40.0, 1e-12);
  EXPECT_NEAR(m.arrival_time, 10.0, 1e-12);
  EXPECT_EQ(m.complete_stops, 0);
}

TEST(Metrics, EmptyTrajectoryIsAnError) {
  EXPECT_THROW(metrics(Trajectory{}), ConfigError);
}

TEST(Metrics, CountsStopsAwayFromEnds) {
  Trajectory t;
  t.steps = {{0, 0, 0, 1, 0, 0, 0, 0},  {5, 2, 5, 1, 50, 0, 100, 1}, {10, 4, 0, 1, 0, 0, 0, 1},
             {15, 9, 4, 1, 50, 0, 100, 1}, {20, 10, 0, 1, 0, 0, 0, 1}, {25, 14, 3, 1, 50, 0, 100, 1},
             {30, 16, 0, 1, 0, 0, 0, 1}};
  EXPECT_EQ(metrics(t).complete_stops, 2);
}

TEST(Metrics, DeterministicForFixedTrajectory) {
  const Scenario sc = *builtin_scenario("route1");
  const Trajectory t = simulate_idm(sc.route, sc.vehicle, sc.idm);
  const RunMetrics a = metrics(t);
  const RunMetrics b = metrics(t);
  EXPECT_EQ(a.total_fuel, b.total_fuel);
  EXPECT_EQ(a.avg_bsfc, b.avg_bsfc);
  EXPECT_EQ(a.passing_clock_times, b.passing_clock_times);
}

TEST(Wilson, KnownValues) {
  const BinomialInterval zero = wilson_interval(0, 10);
  EXPECT_EQ(zero.lo, 0.0);
  EXPECT_NEAR(zero.hi, 0.2775, 1e-4);
  const BinomialInterval half = wilson_interval(5, 10);
  EXPECT_NEAR(half.lo, 0.2366, 1e-4);
  EXPECT_NEAR(half.hi, 0.7634, 1e-4);
}

TEST(Compare, ReproducesPublishedPercentages) {
  const std::vector<RunMetrics> r1{run("op-time", 107.2, 300.0, 91.49), run("op-fuel", 110.5, 310.0, 43.95)};
  const ComparisonReport c1 = compare(r1, "op-time");
  ASSERT_EQ(c1.rows.size(), 1u);
  EXPECT_NEAR(c1.rows[0].fuel_change, -51.9, 0.1);  // reference row is truncated: -51.96
  const std::vector<RunMetrics> r2{run("op-time", 217.9, 300.0, 182.15), run("op-fuel", 228.5, 310.0, 73.79)};
  EXPECT_NEAR(compare(r2, "op-time").rows[0].fuel_change, -59.5, 0.1);
}

TEST(Compare, SelfAndReciprocal) {
  const RunMetrics a = run("a", 100.0, 300.0, 50.0);
  RunMetrics a2 = a;
  a2.label = "a2";
  const std::vector<RunMetrics> same{a, a2};
  const auto self = compare(same, "a").rows[0];
  EXPECT_EQ(self.arrival_change, 0.0);
  EXPECT_EQ(self.fuel_change, 0.0);
  EXPECT_EQ(self.bsfc_change, 0.0);
  const std::vector<RunMetrics> pair{a, run("b", 120.0, 280.0, 70.0)};
  const double ab = compare(pair, "a").rows[0].fuel_change / 100.0;
  const double ba = compare(pair, "b").rows[0].fuel_change / 100.0;
  EXPECT_NEAR((1.0 + ab) * (1.0 + ba), 1.0, 1e-12);
}

TEST(Compare, Errors) {
  const std::vector<RunMetrics> one{run("a", 1, 1, 1)};
  EXPECT_THROW(compare(one, "a"), ConfigError);
  const std::vector<RunMetrics> two{run("a", 1, 1, 1), run("b", 1, 1, 1)};
  EXPECT_THROW(compare(two, "c"), ConfigError);
}

TEST(MonteCarlo, OpenLoopRateMatchesClosedForm) {
  const Route route = one_signal_route(DelayDistribution::moderate_traffic());
  const std::size_t n = 20000;
  const ViolationReport rep = monte_carlo_violations(plan_passing_at(32.0), route, n, 99);
  ASSERT_EQ(rep.per_signal.size(), 1u);
  const double p = 1.0 - oracle::moderate().cdf(2.0);
  EXPECT_NEAR(rep.per_signal[0].rate, p, 4.0 * std::sqrt(p * (1.0 - p) / n));
  EXPECT_LE(rep.per_signal[0].interval.lo, rep.per_signal[0].rate);
  EXPECT_GE(rep.per_signal[0].interval.hi, rep.per_signal[0].rate);
}

TEST(MonteCarlo, WorstCaseQuantileNeverViolates) {
  const DelayDistribution law = DelayDistribution::tabulated({{0.0, 0.0}, {5.0, 0.5}, {20.0, 1.0}});
  const Route route = one_signal_route(law);
  const double clock = gate_threshold(route.signals[0], 1.0);
  const ViolationReport rep = monte_carlo_violations(plan_passing_at(clock), route, 5000, 3);
  EXPECT_EQ(rep.per_signal[0].violations, 0u);
  EXPECT_EQ(rep.runs_with_violation, 0u);
}

TEST(MonteCarlo, ReproducibleAndThreadIndependent) {
  const Route route = one_signal_route(DelayDistribution::heavy_traffic());
  const auto a = monte_carlo_violations(plan_passing_at(45.0), route, 3000, 17, 1);
  const auto b = monte_carlo_violations(plan_passing_at(45.0), route, 3000, 17, 3);
  EXPECT_EQ(a.per_signal[0].violations, b.per_signal[0].violations);
  std::ostringstream ha, hb;
  write_histogram_csv(a, ha);
  write_histogram_csv(b, hb);
  EXPECT_EQ(ha.str(), hb.str());
  const auto c = monte_carlo_violations(plan_passing_at(45.0), route, 3000, 18, 1);
  EXPECT_NE(a.per_signal[0].violations, c.per_signal[0].violations);
}

TEST(MonteCarlo, MissingDistributionIsConfigError) {
  EXPECT_THROW(monte_carlo_violations(plan_passing_at(40.0), one_signal_route(std::nullopt), 10, 1), ConfigError);
  EXPECT_THROW(monte_carlo_violations(plan_passing_at(40.0), one_signal_route(DelayDistribution::light_traffic()), 0, 1),
               ConfigError);
}

TEST(MonteCarlo, ClosedLoopIdmStaysLegal) {
  const Scenario sc = *builtin_scenario("route1");
  const ViolationReport rep = monte_carlo_idm(sc.route, sc.vehicle, sc.idm, 200, 5, 2);
  EXPECT_EQ(rep.runs_with_violation, 0u);
  ASSERT_EQ(rep.arrival_times.size(), 200u);
  EXPECT_LE(rep.arrival_quantile(0.1), rep.arrival_quantile(0.9));
  EXPECT_GT(rep.mean_fuel(), 0.0);
  const ViolationReport again = monte_carlo_idm(sc.route, sc.vehicle, sc.idm, 200, 5, 1);
  EXPECT_EQ(again.arrival_times, rep.arrival_times);
}

TEST(Reports, MetricsCsvRoundTripAndTable) {
  std::vector<RunMetrics> runs{run("op-time", 105.1, 420.4, 127.9), run("op-fuel", 112.7, 812.3, 53.6)};
  runs[0].passing_clock_times = {35.5, 40.0};
  runs[1].avg_bsfc.reset();
  std::stringstream ss;
  write_metrics_csv(runs, ss);
  const auto back = read_metrics_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].passing_clock_times, runs[0].passing_clock_times);
  EXPECT_FALSE(back[1].avg_bsfc.has_value());
  EXPECT_EQ(back[1].total_fuel, 53.6);
  const ComparisonReport cmp = compare(runs, "op-time");
  std::ostringstream table;
  write_metrics_table(runs, &cmp, table);
  EXPECT_NE(table.str().find("Change (op-fuel)"), std::string::npos);
  EXPECT_NE(table.str().find("-58.1%"), std::string::npos);
}
