#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ecodrive/dp_solver.hpp"

namespace ecodrive::detail {

// Fractions closer than this (in grid units) to a node snap onto it, so that
// round-off never drags a zero-weight infeasible neighbour into a blend.
inline constexpr double kSnap = 1e-9;

struct AxisPosition {
  bool inside = false;
  std::size_t index = 0;
  double weight = 0.0;  // weight of index + 1
};

// Position of x on the uniform axis {0, step, ..., (count - 1) * step}.
inline AxisPosition locate_uniform(double x, double step, std::size_t count) {
  const double u = x / step;
  double whole = std::floor(u);
  double frac = u - whole;
  if (frac < kSnap) {
    frac = 0.0;
  } else if (frac > 1.0 - kSnap) {
    whole += 1.0;
    frac = 0.0;
  }
  if (whole < 0.0 || whole > static_cast<double>(count - 1)) return {};
  const auto i = static_cast<std::size_t>(whole);
  if (i == count - 1 && frac > 0.0) return {};
  return {true, i, frac};
}

struct StageInfo {
  double distance = 0.0;
  int signal = -1;          // index into route.signals when a timed signal sits here
  bool stop = false;        // stop sign or destination: must be at rest
  bool rest_ok = false;     // v = 0 nodes exist
  bool can_wait = false;    // standing still lets time pass
  bool gated = false;
  kernels::GateWindow gate;
  double speed_min = 0.0;
  double speed_max = 0.0;
  double cell_grade = 0.0;  // grade of the cell leaving this stage
};

struct Layout {
  std::size_t stages = 0;  // number of distance nodes, origin and destination included
  std::size_t velocities = 0;
  std::vector<double> times;
  std::vector<StageInfo> info;
};

// Throws ConfigError when the route does not align with the grid.
Layout build_layout(const Route& route, const GridSpec& grid, double eta);

// Cost of standing one time step at a line: idle fuel for Op-fuel; for
// Op-time the elapsed time weighted by one distance step, the same weight
// the stage cost puts on time.
inline double wait_cost(Objective objective, const GridSpec& grid, double idle_rate) {
  return objective == Objective::fuel ? idle_rate * grid.time_step : grid.distance_step * grid.time_step;
}

StepContext step_context(const Layout& layout, const GridSpec& grid, std::size_t stage);

}  // namespace ecodrive::detail
