#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dp_internal.hpp"
#include "ecodrive/dp_solver.hpp"
#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Blend {
  double value = kInf;
  double spread = 0.0;  // max - min over the nodes carrying weight
};

// Bilinear read of one stage's cost-to-go, mirroring the kernel arithmetic.
Blend blend(const DPSolution& sol, std::size_t stage, double v, double t) {
  const GridSpec& grid = sol.grid();
  const detail::AxisPosition vp = detail::locate_uniform(v, grid.velocity_step, sol.velocity_count());
  const detail::AxisPosition tp = detail::locate_uniform(t, grid.time_step, sol.time_count());
  if (!vp.inside || !tp.inside) return {};
  const double* lo = sol.cost_row(stage, vp.index) + tp.index;
  const double* hi = vp.weight > 0.0 ? sol.cost_row(stage, vp.index + 1) + tp.index : nullptr;
  const double tw = tp.weight;
  const double vw = vp.weight;
  double a = lo[0];
  if (tw > 0.0) a = a * (1.0 - tw) + lo[1] * tw;
  double value = a;
  if (vw > 0.0) {
    double b = hi[0];
    if (tw > 0.0) b = b * (1.0 - tw) + hi[1] * tw;
    value = a * (1.0 - vw) + b * vw;
  }
  double lowest = lo[0];
  double highest = lo[0];
  auto take = [&](double x) {
    lowest = std::min(lowest, x);
    highest = std::max(highest, x);
  };
  if (tw > 0.0) take(lo[1]);
  if (vw > 0.0) {
    take(hi[0]);
    if (tw > 0.0) take(hi[1]);
  }
  Blend out;
  out.value = value;
  out.spread = std::isfinite(highest - lowest) ? highest - lowest : 0.0;
  return out;
}

struct Move {
  double value = kInf;
  double stage_cost = 0.0;
  std::size_t control = 0;
  StepOutcome outcome;
};

double stage_cost(Objective objective, double distance_step, double t, const StepOutcome& st) {
  if (objective == Objective::fuel) return st.fuel;
  return distance_step * st.elapsed * 0.5 + distance_step * t;
}

Move best_move(const DPSolution& sol, const detail::Layout& layout, const Vehicle& vehicle,
               std::size_t k, double v, double t) {
  const GridSpec& grid = sol.grid();
  const StepContext ctx = detail::step_context(layout, grid, k);
  const detail::StageInfo& next = layout.info[k + 1];
  Move best;
  for (std::size_t ci = 0; ci < sol.controls().size(); ++ci) {
    const StepOutcome st = step_dynamics(vehicle, v, sol.controls()[ci], ctx);
    if (!st.feasible) continue;
    const double arrival = t + st.elapsed;
    if (next.gated && st.velocity > 0.0 &&
        !(periodic_clock(next.gate.offset, next.gate.period, arrival) >= next.gate.threshold)) {
      continue;
    }
    const Blend b = blend(sol, k + 1, st.velocity, arrival);
    if (!std::isfinite(b.value)) continue;
    const double c = stage_cost(sol.objective(), grid.distance_step, t, st);
    const double candidate = c + b.value;
    if (candidate < best.value) best = {candidate, c, ci, st};
  }
  return best;
}

}  // namespace

Trajectory extract_trajectory(const DPSolution& sol, const Route& route, const Vehicle& vehicle) {
  if (!sol.feasible()) throw ConsistencyError("no feasible plan to replay");
  const detail::Layout layout = detail::build_layout(route, sol.grid(), sol.eta());
  if (layout.stages != sol.stage_count() || layout.times.size() != sol.time_count()) {
    throw ConsistencyError("route does not match the solved grid");
  }
  const GridSpec& grid = sol.grid();
  const double idle = vehicle.fuel_map.idle_rate();
  const double wait_cost = detail::wait_cost(sol.objective(), grid, idle);

  Trajectory traj;
  traj.method = method_name(sol.objective());
  traj.eta = sol.eta();
  traj.grid = grid.describe();
  traj.predicted_cost = sol.origin_cost();
  traj.steps.push_back({0.0, 0.0, 0.0, grid.gears.front(), 0.0, 0.0, 0.0, 0.0});

  double v = 0.0;
  double t = 0.0;
  double standing_fuel = 0.0;
  double objective = 0.0;
  double bound = 0.0;
  for (std::size_t k = 0; k + 1 < layout.stages; ++k) {
    const detail::StageInfo& here = layout.info[k];
    auto launch_allowed = [&](double when) {
      return !here.gated || periodic_clock(here.gate.offset, here.gate.period, when) >= here.gate.threshold;
    };
    if (here.can_wait && v == 0.0) {
      while (true) {
        const Move launch = launch_allowed(t) ? best_move(sol, layout, vehicle, k, v, t) : Move{};
        const Blend later = blend(sol, k, 0.0, t + grid.time_step);
        const double wait = wait_cost + later.value;
        if (!(wait < launch.value)) break;
        bound += blend(sol, k, 0.0, t).spread;
        objective += wait_cost;
        standing_fuel += idle * grid.time_step;
        t += grid.time_step;
      }
    }
    if (!launch_allowed(t)) {
      throw ConsistencyError("replay departs signal at " + std::to_string(here.distance) + " m during red");
    }
    const Move mv = best_move(sol, layout, vehicle, k, v, t);
    if (!std::isfinite(mv.value)) {
      throw ConsistencyError("replay reached an infeasible state at " + std::to_string(here.distance) + " m");
    }
    bound += blend(sol, k, v, t).spread;
    if (here.signal >= 0) {
      const SignalSpec& sig = route.signals[static_cast<std::size_t>(here.signal)];
      traj.passings.push_back({sig.position, t, clock_time(sig, t), here.gate.threshold});
    }
    const Control& u = sol.controls()[mv.control];
    objective += mv.stage_cost;
    v = mv.outcome.velocity;
    t += mv.outcome.elapsed;
    traj.steps.push_back({layout.info[k + 1].distance, t, v, u.gear, u.engine_torque, u.brake_torque,
                          mv.outcome.engine_speed, standing_fuel + mv.outcome.fuel});
    standing_fuel = 0.0;
  }
  if (v != 0.0 || t > route.deadline + 1e-9) {
    throw ConsistencyError("replay does not end at rest within the deadline");
  }
  traj.objective_value = objective;
  traj.interpolation_bound = bound;
  traj.check_invariants();
  return traj;
}

}  // namespace ecodrive
