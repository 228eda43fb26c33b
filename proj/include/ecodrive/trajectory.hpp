#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ecodrive {

// One row per distance step. Engine quantities and the fuel increment belong
// to the cell that ends at `distance`; fuel burnt while standing at the
// previous position is folded into the same increment.
struct TrajectoryStep {
  double distance = 0.0;        // m
  double time = 0.0;            // s, arrival time at `distance`
  double velocity = 0.0;        // m/s
  int gear = 1;
  double engine_torque = 0.0;   // N*m
  double brake_torque = 0.0;    // N*m
  double engine_speed = 0.0;    // rad/s
  double fuel = 0.0;            // g

  bool operator==(const TrajectoryStep&) const = default;
};

// Crossing of a signal line: universal time, signal clock reading and the
// clock threshold the plan respected (base red for deterministic plans).
struct SignalPassing {
  double position = 0.0;
  double passing_time = 0.0;
  double clock_time = 0.0;
  double threshold = 0.0;

  bool operator==(const SignalPassing&) const = default;
};

struct Trajectory {
  std::string scenario_hash;
  std::string method;        // "op-fuel", "op-time" or "idm"
  double eta = 0.0;          // 0 for deterministic plans
  std::string grid;          // compact grid description
  std::vector<TrajectoryStep> steps;
  std::vector<SignalPassing> passings;
  double objective_value = 0.0;   // replayed objective
  double predicted_cost = 0.0;    // cost-to-go at the origin (DP only)
  double interpolation_bound = 0.0;

  double arrival_time() const { return steps.empty() ? 0.0 : steps.back().time; }
  double total_fuel() const;

  // Throws ConsistencyError when the record invariants do not hold
  // (distance strictly increasing, time non-decreasing, fuel >= 0).
  void check_invariants() const;
};

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace ecodrive
