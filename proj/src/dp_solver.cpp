#include "ecodrive/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "dp_internal.hpp"
#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlignTolerance = 1e-9;
constexpr double kSpeedTolerance = 1e-9;

std::size_t aligned_count(double extent, double step, const std::string& what) {
  const double u = extent / step;
  const double r = std::round(u);
  if (std::abs(u - r) > kAlignTolerance * std::max(1.0, u)) {
    throw ConfigError(what + " (" + std::to_string(extent) + ") is not a multiple of the step " +
                      std::to_string(step));
  }
  return static_cast<std::size_t>(r);
}

}  // namespace

std::string_view objective_name(Objective objective) {
  return objective == Objective::fuel ? "fuel" : "time";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "fuel") return Objective::fuel;
  if (name == "time") return Objective::time;
  return std::nullopt;
}

std::string method_name(Objective objective) {
  return objective == Objective::fuel ? "op-fuel" : "op-time";
}

void GridSpec::validate() const {
  if (!(distance_step > 0.0) || !(velocity_step > 0.0) || !(time_step > 0.0)) {
    throw ConfigError("grid: steps must be positive");
  }
  if (engine_torque_levels < 2) throw ConfigError("grid: need at least 2 engine torque levels");
  if (brake_torque_levels < 1) throw ConfigError("grid: need at least 1 brake torque level");
  if (gears.empty()) throw ConfigError("grid: gear set is empty");
  for (std::size_t i = 0; i < gears.size(); ++i) {
    if (gears[i] < 1 || gears[i] > kGearCount) throw ConfigError("grid: gear out of range");
    if (i > 0 && gears[i] <= gears[i - 1]) throw ConfigError("grid: gears must be increasing");
  }
  if (substeps < 1) throw ConfigError("grid: substeps must be >= 1");
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "dD=" << distance_step << ";dv=" << velocity_step << ";dt=" << time_step
     << ";nT=" << engine_torque_levels << ";nB=" << brake_torque_levels << ";gears=";
  for (std::size_t i = 0; i < gears.size(); ++i) os << (i ? "/" : "") << gears[i];
  os << ";sub=" << substeps;
  return os.str();
}

std::vector<Control> build_controls(const VehicleParams& params, const GridSpec& grid) {
  grid.validate();
  std::vector<double> torques(static_cast<std::size_t>(grid.engine_torque_levels));
  for (int i = 0; i < grid.engine_torque_levels; ++i) {
    torques[i] = params.engine_torque_min +
                 (params.engine_torque_max - params.engine_torque_min) * i / (grid.engine_torque_levels - 1);
  }
  std::vector<double> brakes(static_cast<std::size_t>(grid.brake_torque_levels));
  for (int i = 0; i < grid.brake_torque_levels; ++i) {
    brakes[i] = grid.brake_torque_levels == 1
                    ? 0.0
                    : params.brake_torque_max * i / (grid.brake_torque_levels - 1);
  }
  std::vector<Control> controls;
  for (int gear : grid.gears) {
    for (double te : torques) {
      for (double tb : brakes) {
        if (tb > 0.0 && te > 0.0) continue;
        controls.push_back({te, tb, gear});
      }
    }
  }
  if (controls.size() >= kPolicyWait) throw ConfigError("grid: too many controls");
  return controls;
}

StepOutcome step_dynamics(const Vehicle& vehicle, double velocity, const Control& control,
                          const StepContext& ctx) {
  const VehicleParams& p = vehicle.params;
  StepOutcome out;
  const double ratio = gear_ratio(p, control.gear);
  const double h = ctx.distance_step / ctx.substeps;
  double v = velocity;
  for (int s = 0; s < ctx.substeps; ++s) {
    if (engine_speed(v, ratio, p.wheel_radius) > p.engine_speed_max) return {};
    const double a = acceleration(p, v, control.engine_torque, control.brake_torque, control.gear, ctx.grade);
    if (a < p.accel_min || a > p.accel_max) return {};
    const double disc = v * v + 2.0 * a * h;
    double v_next = 0.0;
    bool stopped = false;
    if (disc < 0.0) {
      // Brakes stronger than needed: come to rest on the line.
      if (!(ctx.admits_rest && s == ctx.substeps - 1) || !(v > 0.0)) return {};
      stopped = true;
    } else {
      v_next = std::sqrt(disc);
      stopped = v_next == 0.0;
    }
    const double mean_speed = 0.5 * (v + v_next);
    if (!(mean_speed > 0.0)) return {};
    if (engine_speed(v_next, ratio, p.wheel_radius) > p.engine_speed_max) return {};
    const double dt = h / mean_speed;
    const double w_mid = engine_speed(mean_speed, ratio, p.wheel_radius);
    out.fuel += vehicle.fuel_map.rate(control.engine_torque, w_mid) * dt;
    out.elapsed += dt;
    out.engine_speed = w_mid;
    out.stopped = stopped;
    v = v_next;
  }
  if (v < ctx.speed_min - kSpeedTolerance || v > ctx.speed_max + kSpeedTolerance) return {};
  if (v == 0.0 && !ctx.admits_rest) return {};
  out.velocity = v;
  out.feasible = true;
  return out;
}

bool signal_gate(const Route& route, double distance, double time, double velocity, double eta) {
  for (const SignalSpec& sig : route.signals) {
    if (std::abs(sig.position - distance) > kAlignTolerance) continue;
    if (sig.kind == SignalKind::stop) return velocity == 0.0;
    return clock_time(sig, time) >= gate_threshold(sig, eta);
  }
  if (std::abs(distance - route.length) <= kAlignTolerance) return velocity == 0.0;
  return true;
}

namespace detail {

Layout build_layout(const Route& route, const GridSpec& grid, double eta) {
  route.validate();
  grid.validate();
  Layout layout;
  const std::size_t cells = aligned_count(route.length, grid.distance_step, "route length");
  if (cells == 0) throw ConfigError("route shorter than one distance step");
  layout.stages = cells + 1;
  layout.velocities = aligned_count(route.speed_max.max_value(), grid.velocity_step, "maximum speed limit") + 1;
  const std::size_t time_cells = aligned_count(route.deadline, grid.time_step, "deadline");
  layout.times.resize(time_cells + 1);
  for (std::size_t j = 0; j <= time_cells; ++j) layout.times[j] = static_cast<double>(j) * grid.time_step;

  layout.info.resize(layout.stages);
  for (std::size_t k = 0; k < layout.stages; ++k) {
    detail::StageInfo& s = layout.info[k];
    s.distance = static_cast<double>(k) * grid.distance_step;
    s.speed_min = route.speed_min.at(s.distance);
    s.speed_max = route.speed_max.at(s.distance);
    s.cell_grade = k + 1 < layout.stages ? route.grade.at(s.distance + 0.5 * grid.distance_step) : 0.0;
  }
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    const SignalSpec& sig = route.signals[i];
    const std::size_t k = aligned_count(sig.position, grid.distance_step,
                                        "position of route.signals[" + std::to_string(i) + "]");
    detail::StageInfo& s = layout.info[k];
    if (sig.kind == SignalKind::stop) {
      s.stop = true;
    } else {
      s.signal = static_cast<int>(i);
      s.gated = true;
      s.gate = {sig.clock_offset, sig.cycle_period, gate_threshold(sig, eta)};
    }
    s.rest_ok = true;
    s.can_wait = true;
  }
  layout.info.front().rest_ok = true;
  layout.info.front().can_wait = false;
  auto& last = layout.info.back();
  last.stop = true;
  last.rest_ok = true;
  last.can_wait = false;
  return layout;
}

StepContext step_context(const Layout& layout, const GridSpec& grid, std::size_t stage) {
  const StageInfo& here = layout.info[stage];
  const StageInfo& next = layout.info[stage + 1];
  StepContext ctx;
  ctx.distance_step = grid.distance_step;
  ctx.grade = here.cell_grade;
  ctx.speed_min = next.speed_min;
  ctx.speed_max = next.speed_max;
  ctx.admits_rest = next.rest_ok;
  ctx.substeps = grid.substeps;
  return ctx;
}

}  // namespace detail

bool DPSolution::feasible() const { return stages_ > 0 && std::isfinite(cost_to_go(0, 0, 0)); }

const double* DPSolution::cost_row(std::size_t stage, std::size_t iv) const {
  return cost_.data() + (stage * velocities_ + iv) * times_.size();
}

double DPSolution::cost_to_go(std::size_t stage, std::size_t iv, std::size_t it) const {
  return cost_[(stage * velocities_ + iv) * times_.size() + it];
}

PolicyEntry DPSolution::policy(std::size_t stage, std::size_t iv, std::size_t it) const {
  const std::uint16_t code = policy_[(stage * velocities_ + iv) * times_.size() + it];
  if (code == kPolicyNone) return {};
  if (code == kPolicyWait) return {PolicyEntry::Kind::wait, {}};
  return {PolicyEntry::Kind::move, controls_[code]};
}

namespace {

struct StageWork {
  const Route* route;
  const Vehicle* vehicle;
  const GridSpec* grid;
  const detail::Layout* layout;
  const std::vector<Control>* controls;
  kernels::RelaxFn relax;
  Objective objective;
  double idle_rate;
};

bool node_admissible(const detail::StageInfo& s, double v) {
  if (v > s.speed_max + kSpeedTolerance || v < s.speed_min - kSpeedTolerance) return false;
  if (v == 0.0) return s.rest_ok;
  return !s.stop;
}

void solve_row(const StageWork& w, std::size_t k, std::size_t iv, const double* next_stage,
               double* best, std::uint16_t* choice) {
  const detail::Layout& layout = *w.layout;
  const std::size_t nt = layout.times.size();
  const std::size_t nv = layout.velocities;
  std::fill(best, best + nt, kInf);
  std::fill(choice, choice + nt, kPolicyNone);
  const detail::StageInfo& here = layout.info[k];
  const double v = static_cast<double>(iv) * w.grid->velocity_step;
  if (!node_admissible(here, v)) return;

  const detail::StageInfo& next = layout.info[k + 1];
  const StepContext ctx = detail::step_context(layout, *w.grid, k);
  const double dD = w.grid->distance_step;
  for (std::size_t ci = 0; ci < w.controls->size(); ++ci) {
    const StepOutcome st = step_dynamics(*w.vehicle, v, (*w.controls)[ci], ctx);
    if (!st.feasible) continue;
    const detail::AxisPosition vp = detail::locate_uniform(st.velocity, w.grid->velocity_step, nv);
    if (!vp.inside) continue;
    const detail::AxisPosition shift = detail::locate_uniform(st.elapsed, w.grid->time_step, nt);
    if (!shift.inside) continue;
    const std::size_t reach = shift.index + (shift.weight > 0.0 ? 1 : 0);
    if (reach >= nt) continue;
    kernels::RowRelaxation row;
    row.row_lo = next_stage + vp.index * nt;
    row.row_hi = vp.weight > 0.0 ? next_stage + (vp.index + 1) * nt : nullptr;
    row.velocity_weight = vp.weight;
    row.shift = shift.index;
    row.time_weight = shift.weight;
    row.valid = nt - reach;
    row.elapsed = st.elapsed;
    if (w.objective == Objective::fuel) {
      row.stage_cost = st.fuel;
    } else {
      row.stage_cost = dD * st.elapsed * 0.5;
      row.cost_per_time = dD;
    }
    row.gate = (next.gated && st.velocity > 0.0) ? &next.gate : nullptr;
    w.relax(row, layout.times.data(), best, choice, static_cast<std::uint16_t>(ci));
  }

  if (here.gated) {
    for (std::size_t j = 0; j < nt; ++j) {
      if (!(periodic_clock(here.gate.offset, here.gate.period, layout.times[j]) >= here.gate.threshold)) {
        best[j] = kInf;
        choice[j] = kPolicyNone;
      }
    }
  }
  if (here.can_wait && iv == 0) {
    const double wait_cost = detail::wait_cost(w.objective, *w.grid, w.idle_rate);
    for (std::size_t j = nt - 1; j-- > 0;) {
      const double candidate = wait_cost + best[j + 1];
      if (candidate < best[j]) {
        best[j] = candidate;
        choice[j] = kPolicyWait;
      }
    }
  }
}

}  // namespace

DPSolution solve(const Route& route, const Vehicle& vehicle, const GridSpec& grid,
                 const SolverOptions& options) {
  if (!(options.eta >= 0.0 && options.eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
  vehicle.params.validate();
  const detail::Layout layout = detail::build_layout(route, grid, options.eta);

  DPSolution sol;
  sol.objective_ = options.objective;
  sol.eta_ = options.eta;
  sol.grid_ = grid;
  sol.controls_ = build_controls(vehicle.params, grid);
  sol.isa_ = options.isa.value_or(kernels::best_isa());
  sol.stages_ = layout.stages;
  sol.velocities_ = layout.velocities;
  sol.times_ = layout.times;
  const std::size_t nt = layout.times.size();
  const std::size_t nv = layout.velocities;
  const std::size_t stage_size = nv * nt;
  sol.cost_.assign(layout.stages * stage_size, kInf);
  sol.policy_.assign(layout.stages * stage_size, kPolicyNone);

  const StageWork work{&route,      &vehicle, &grid, &layout, &sol.controls_,
                       kernels::relax_kernel(sol.isa_), options.objective,
                       vehicle.fuel_map.idle_rate()};

  // Destination: at rest, any time within the deadline.
  double* terminal = sol.cost_.data() + (layout.stages - 1) * stage_size;
  std::fill(terminal, terminal + nt, 0.0);

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(nv)));
  for (std::size_t k = layout.stages - 1; k-- > 0;) {
    const double* next_stage = sol.cost_.data() + (k + 1) * stage_size;
    double* stage = sol.cost_.data() + k * stage_size;
    std::uint16_t* policy = sol.policy_.data() + k * stage_size;
    auto run_rows = [&](unsigned worker) {
      for (std::size_t iv = worker; iv < nv; iv += threads) {
        solve_row(work, k, iv, next_stage, stage + iv * nt, policy + iv * nt);
      }
    };
    if (threads == 1) {
      run_rows(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 1; t < threads; ++t) pool.emplace_back(run_rows, t);
      run_rows(0);
    }
    const bool any_finite = std::any_of(stage, stage + stage_size, [](double c) { return std::isfinite(c); });
    if (!any_finite) {
      sol.first_infeasible_stage_ = k;
      break;
    }
  }
  if (!sol.feasible() && !sol.first_infeasible_stage_) sol.first_infeasible_stage_ = 0;
  return sol;
}

}  // namespace ecodrive
