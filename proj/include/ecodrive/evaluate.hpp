#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecodrive/dp_solver.hpp"
#include "ecodrive/idm.hpp"
#include "ecodrive/route.hpp"
#include "ecodrive/trajectory.hpp"

namespace ecodrive {

struct RunMetrics {
  std::string label;
  std::string scenario_hash;
  double eta = 0.0;
  double arrival_time = 0.0;          // s
  double total_fuel = 0.0;            // g
  std::optional<double> avg_bsfc;     // g/kWh over positive crank energy
  double positive_energy = 0.0;       // J
  std::vector<double> passing_clock_times;
  int complete_stops = 0;
};

// Throws ConfigError for an empty trajectory.
RunMetrics metrics(const Trajectory& traj);

struct BinomialInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval at 95 % confidence.
BinomialInterval wilson_interval(std::size_t successes, std::size_t trials);

struct SignalViolationStats {
  double position = 0.0;
  std::size_t violations = 0;
  double rate = 0.0;
  BinomialInterval interval;
};

struct HistogramBin {
  std::size_t signal = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
};

struct ViolationReport {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<SignalViolationStats> per_signal;
  std::size_t runs_with_violation = 0;
  BinomialInterval run_interval;
  std::vector<double> arrival_times;  // one per replicate, in replicate order
  std::vector<double> fuel;           // one per replicate
  std::vector<HistogramBin> histogram;

  // Empirical q-quantile of the arrival times (nearest rank).
  double arrival_quantile(double q) const;
  double mean_fuel() const;
};

// Open-loop plan: draws one delay per signal per replicate and counts entries
// during the realised red. The plan is not re-planned after a violation.
ViolationReport monte_carlo_violations(const Trajectory& plan, const Route& route,
                                       std::size_t samples, std::uint64_t seed,
                                       unsigned threads = 1);

// Closed-loop IDM: re-simulates every replicate against its sampled delays.
ViolationReport monte_carlo_idm(const Route& route, const Vehicle& vehicle, const IdmParams& idm,
                                std::size_t samples, std::uint64_t seed, unsigned threads = 1);

struct ComparisonRow {
  std::string label;
  double arrival_change = 0.0;  // percent vs baseline
  double bsfc_change = 0.0;
  double fuel_change = 0.0;
};

struct ComparisonReport {
  std::string baseline;
  std::vector<ComparisonRow> rows;  // every run except the baseline
};

// Percentage deltas relative to the run labelled `baseline`. Throws
// ConfigError with fewer than two runs or an unknown baseline.
ComparisonReport compare(std::span<const RunMetrics> runs, const std::string& baseline);

void write_metrics_csv(std::span<const RunMetrics> runs, std::ostream& out);
std::vector<RunMetrics> read_metrics_csv(std::istream& in);
void write_metrics_table(std::span<const RunMetrics> runs, const ComparisonReport* comparison,
                         std::ostream& out);
void write_violation_csv(const ViolationReport& report, std::ostream& out);
void write_histogram_csv(const ViolationReport& report, std::ostream& out);

}  // namespace ecodrive
