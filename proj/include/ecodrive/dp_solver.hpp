#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecodrive/fuel_map.hpp"
#include "ecodrive/kernels.hpp"
#include "ecodrive/route.hpp"
#include "ecodrive/trajectory.hpp"
#include "ecodrive/vehicle.hpp"

namespace ecodrive {

enum class Objective { fuel, time };

std::string_view objective_name(Objective objective);
std::optional<Objective> parse_objective(std::string_view name);
std::string method_name(Objective objective);  // "op-fuel" / "op-time"

struct Vehicle {
  VehicleParams params;
  FuelMap fuel_map = FuelMap::synthetic();

  bool operator==(const Vehicle&) const = default;
};

// Discretisation of the spatial dynamic program.
struct GridSpec {
  double distance_step = 5.0;   // m
  double velocity_step = 0.5;   // m/s, axis [0, max speed limit]
  double time_step = 0.5;       // s, axis [0, deadline]
  int engine_torque_levels = 25;
  int brake_torque_levels = 5;
  std::vector<int> gears{1, 2, 3, 4, 5, 6};
  int substeps = 1;             // integration sub-steps per distance cell

  void validate() const;
  std::string describe() const;
  bool operator==(const GridSpec&) const = default;
};

struct Control {
  double engine_torque = 0.0;
  double brake_torque = 0.0;
  int gear = 1;

  bool operator==(const Control&) const = default;
};

// Control grid ordered by (gear, engine torque, brake torque); that order is
// the argmin tie-break. Positive brake torque is only paired with
// non-positive engine torque, the other combinations being dominated.
std::vector<Control> build_controls(const VehicleParams& params, const GridSpec& grid);

struct StepContext {
  double distance_step = 5.0;
  double grade = 0.0;
  double speed_min = 0.0;   // limits at the end of the cell
  double speed_max = 16.0;
  bool admits_rest = false; // the cell ends at a stop line, signal or the destination
  int substeps = 1;
};

struct StepOutcome {
  bool feasible = false;
  bool stopped = false;       // came to rest exactly at the end of the cell
  double velocity = 0.0;      // at the end of the cell
  double elapsed = 0.0;       // s
  double fuel = 0.0;          // g
  double engine_speed = 0.0;  // rad/s at mid-cell speed (last sub-step)
};

// Integrates dv/dD = a/v, dt/dD = 1/v across one cell with the control held
// constant: v' = sqrt(v^2 + 2 a dD) and dt = dD / mean(v, v'). When the
// braking would stop the vehicle inside a cell that ends at a rest-capable
// position, it stops exactly on the line instead. Infeasible transitions
// return feasible == false.
StepOutcome step_dynamics(const Vehicle& vehicle, double velocity, const Control& control,
                          const StepContext& context);

// Passing test for a state at `distance`: a signal requires its clock to be
// past the (possibly chance-tightened) red, a stop sign requires standstill.
bool signal_gate(const Route& route, double distance, double time, double velocity, double eta);

struct SolverOptions {
  Objective objective = Objective::fuel;
  double eta = 0.0;   // 0 means deterministic signal timing
  unsigned threads = 1;
  std::optional<kernels::Isa> isa;  // default: best available
};

struct PolicyEntry {
  enum class Kind { none, move, wait };
  Kind kind = Kind::none;
  Control control;
};

class DPSolution {
 public:
  bool feasible() const;
  // Highest stage at which every node was infeasible, if any.
  std::optional<std::size_t> first_infeasible_stage() const { return first_infeasible_stage_; }
  double origin_cost() const { return cost_to_go(0, 0, 0); }

  double cost_to_go(std::size_t stage, std::size_t velocity_index, std::size_t time_index) const;
  PolicyEntry policy(std::size_t stage, std::size_t velocity_index, std::size_t time_index) const;

  Objective objective() const { return objective_; }
  double eta() const { return eta_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<Control>& controls() const { return controls_; }
  kernels::Isa isa() const { return isa_; }

  std::size_t stage_count() const { return stages_; }
  std::size_t velocity_count() const { return velocities_; }
  std::size_t time_count() const { return times_.size(); }
  double velocity_at(std::size_t i) const { return static_cast<double>(i) * grid_.velocity_step; }
  double time_at(std::size_t j) const { return times_[j]; }

  // Direct access for the trajectory replay.
  const double* cost_row(std::size_t stage, std::size_t velocity_index) const;

 private:
  friend DPSolution solve(const Route&, const Vehicle&, const GridSpec&, const SolverOptions&);

  Objective objective_ = Objective::fuel;
  double eta_ = 0.0;
  GridSpec grid_;
  std::vector<Control> controls_;
  kernels::Isa isa_ = kernels::Isa::scalar;
  std::size_t stages_ = 0;
  std::size_t velocities_ = 0;
  std::vector<double> times_;
  std::vector<double> cost_;
  std::vector<std::uint16_t> policy_;
  std::optional<std::size_t> first_infeasible_stage_;
};

inline constexpr std::uint16_t kPolicyNone = 0xFFFF;
inline constexpr std::uint16_t kPolicyWait = 0xFFFE;

// Backward induction from the destination to the origin over
// (velocity x time) nodes at every distance step.
DPSolution solve(const Route& route, const Vehicle& vehicle, const GridSpec& grid,
                 const SolverOptions& options);

// Forward replay of the optimal policy from (v = 0, t = 0). Off-grid states
// re-run the one-step minimisation against the stored cost-to-go, using the
// same arithmetic as the backward pass. Throws ConsistencyError if the replay
// reaches an infeasible state or a gate is violated.
Trajectory extract_trajectory(const DPSolution& solution, const Route& route,
                              const Vehicle& vehicle);

}  // namespace ecodrive
