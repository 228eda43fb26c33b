#include "ecodrive/idm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCreep = 0.05;  // m/s; below this a braking vehicle is put on the line

double upshift_speed(const VehicleParams& params, int gear) {
  return 0.75 * params.engine_speed_max * gear / kGearCount;
}

struct Line {
  double position;
  int signal;     // index into route.signals, -1 for stop signs and the destination
  bool terminal;
};

struct Drive {
  int gear;
  double engine_torque;
  double brake_torque;
  double acceleration;  // possibly reduced to what the powertrain delivers
};

// Inverse dynamics: the torques that realise `a` at speed v. Traction beyond
// the torque limit first tries lower gears, then caps the acceleration.
Drive inverse_dynamics(const VehicleParams& p, double v, double a, double grade, int gear) {
  const double resist = resistance_force(p, v, grade);
  const double force = p.mass * a + resist;
  if (force >= 0.0) {
    for (int g = gear; g >= 1; --g) {
      const double ratio = gear_ratio(p, g);
      if (g < gear && engine_speed(v, ratio, p.wheel_radius) > p.engine_speed_max) break;
      const double torque = force * p.wheel_radius / ratio;
      if (torque <= p.engine_torque_max) return {g, torque, 0.0, a};
    }
    const double ratio = gear_ratio(p, gear);
    const double capped = (p.engine_torque_max * ratio / p.wheel_radius - resist) / p.mass;
    return {gear, p.engine_torque_max, 0.0, std::min(a, capped)};
  }
  const double ratio = gear_ratio(p, gear);
  const double torque = force * p.wheel_radius / ratio;
  if (torque >= p.engine_torque_min) return {gear, torque, 0.0, a};
  // Engine drag first; the wheel brake covers the rest.
  const double brake = p.engine_torque_min * ratio - force * p.wheel_radius;
  return {gear, p.engine_torque_min, brake, a};
}

// Third term of the desired gap, already signed for subtraction.
double gap_form_term(const IdmParams& p, double velocity, double gap) {
  const double scale = 2.0 * std::sqrt(p.max_accel * p.comfort_decel);
  if (p.gap_form == GapForm::standard) return -velocity * velocity / scale;
  if (!std::isfinite(gap)) return 0.0;
  return velocity * gap / scale;
}

}  // namespace

void IdmParams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw ConfigError(std::string("idm: ") + name + " must be positive");
  };
  positive(min_gap, "min_gap");
  positive(headway, "headway");
  positive(comfort_decel, "comfort_decel");
  positive(max_accel, "max_accel");
  positive(desired_speed, "desired_speed");
  positive(vision_distance, "vision_distance");
  positive(timestep, "timestep");
  if (timestep > 0.5) throw ConfigError("idm: timestep must not exceed 0.5 s");
  if (!(horizon_factor >= 1.0)) throw ConfigError("idm: horizon_factor must be >= 1");
}

double desired_gap(const IdmParams& p, double velocity, double gap) {
  const double third = gap_form_term(p, velocity, gap);
  return std::max(p.min_gap, p.min_gap + velocity * p.headway - third);
}


double idm_acceleration(const IdmParams& p, double velocity, double gap, bool signal_ahead) {
  if (signal_ahead) return -velocity * velocity / (2.0 * gap);
  const double speed_term = std::pow(velocity / p.desired_speed, 4);
  if (!std::isfinite(gap)) return p.max_accel * (1.0 - speed_term);
  const double ratio = desired_gap(p, velocity, gap) / gap;
  return p.max_accel * (1.0 - speed_term - ratio * ratio);
}

int scheduled_gear(const VehicleParams& params, double velocity, int current) {
  int g = std::clamp(current, 1, kGearCount);
  auto crank = [&](int gear) { return engine_speed(velocity, gear_ratio(params, gear), params.wheel_radius); };
  while (g < kGearCount && crank(g) > upshift_speed(params, g)) ++g;
  while (g > 1 && crank(g - 1) < 0.9 * upshift_speed(params, g - 1)) --g;
  return g;
}

Trajectory simulate_idm(const Route& route, const Vehicle& vehicle, const IdmParams& p,
                        std::span<const double> delays) {
  route.validate();
  p.validate();
  const VehicleParams& vp = vehicle.params;
  if (!delays.empty() && delays.size() != route.signals.size()) {
    throw ConfigError("idm: expected " + std::to_string(route.signals.size()) + " delays, got " +
                      std::to_string(delays.size()));
  }
  auto delay_of = [&](int i) { return delays.empty() ? 0.0 : delays[static_cast<std::size_t>(i)]; };
  auto red_at = [&](int i, double t) {
    const SignalSpec& sig = route.signals[static_cast<std::size_t>(i)];
    return clock_time(sig, t) < sig.base_red + delay_of(i);
  };

  std::vector<Line> lines;
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    const SignalSpec& sig = route.signals[i];
    lines.push_back({sig.position, sig.kind == SignalKind::signal ? static_cast<int>(i) : -1, false});
  }
  lines.push_back({route.length, -1, true});

  const double free_flow = route.length / std::min(p.desired_speed, route.speed_max.max_value());
  const double horizon = p.horizon_factor * free_flow;

  Trajectory traj;
  traj.method = "idm";
  traj.steps.push_back({0.0, 0.0, 0.0, 1, 0.0, 0.0, 0.0, 0.0});

  double x = 0.0;
  double v = 0.0;
  double t = 0.0;
  int gear = 1;
  double standing_fuel = 0.0;
  std::size_t next = 0;
  const double dt = p.timestep;

  while (true) {
    if (t > horizon) {
      throw SimulationError("idm: no arrival within " + std::to_string(horizon) + " s");
    }
    const Line& line = lines[next];
    if (x >= line.position && v == 0.0) {
      if (line.terminal) break;
      if (line.signal < 0 || !red_at(line.signal, t)) {
        if (line.signal >= 0) {
          const SignalSpec& sig = route.signals[static_cast<std::size_t>(line.signal)];
          traj.passings.push_back({sig.position, t, clock_time(sig, t), sig.base_red + delay_of(line.signal)});
        }
        ++next;
        continue;
      }
    }

    const double to_line = line.position - x;
    const bool in_view = to_line <= p.vision_distance;
    const bool must_stop = in_view && (line.signal < 0 || red_at(line.signal, t));
    double a = 0.0;
    if (x >= line.position) {
      a = 0.0;  // held at a red line
    } else if (must_stop && (v > kCreep || line.signal >= 0)) {
      a = idm_acceleration(p, v, to_line, true);
    } else {
      a = idm_acceleration(p, v, kInf, false);
    }
    const double grade = route.grade.at(std::min(x, route.length));
    gear = scheduled_gear(vp, v, gear);
    const Drive drive = inverse_dynamics(vp, v, a, grade, gear);
    gear = drive.gear;
    a = drive.acceleration;

    double v_next = std::max(0.0, v + a * dt);
    double step = dt;
    if (a < 0.0 && v + a * dt < 0.0) step = v / -a;  // comes to rest inside the step
    v_next = std::min(v_next, route.speed_max.at(std::min(x, route.length)));
    double x_next = x + 0.5 * (v + v_next) * step;

    if (must_stop && (x_next >= line.position || (a < 0.0 && v_next <= kCreep))) {
      x_next = line.position;
      v_next = 0.0;
    } else if (x_next > line.position) {
      const double crossing = t + dt * (line.position - x) / (x_next - x);
      if (line.signal >= 0 && red_at(line.signal, crossing)) {
        x_next = line.position;
        v_next = 0.0;
      } else if (line.signal >= 0) {
        const SignalSpec& sig = route.signals[static_cast<std::size_t>(line.signal)];
        traj.passings.push_back(
            {sig.position, crossing, clock_time(sig, crossing), sig.base_red + delay_of(line.signal)});
        ++next;
      } else {
        x_next = line.position;
        v_next = 0.0;
      }
    }

    const double w = engine_speed(v, gear_ratio(vp, gear), vp.wheel_radius);
    const double fuel = vehicle.fuel_map.rate(drive.engine_torque, w) * dt;
    t += dt;
    if (x_next > x) {
      traj.steps.push_back({x_next, t, v_next, gear, drive.engine_torque, drive.brake_torque, w,
                            standing_fuel + fuel});
      standing_fuel = 0.0;
    } else {
      standing_fuel += vehicle.fuel_map.idle_rate() * dt;
    }
    x = x_next;
    v = v_next;
  }
  if (standing_fuel > 0.0 && traj.steps.size() > 1) traj.steps.back().fuel += standing_fuel;
  traj.objective_value = traj.total_fuel();
  traj.check_invariants();
  return traj;
}

}  // namespace ecodrive
