#include "ecodrive/vehicle.hpp"

#include <cmath>
#include <string>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kTorqueTolerance = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("vehicle: " + what);
}

}  // namespace

void VehicleParams::validate() const {
  require(mass > 0.0, "mass must be positive");
  require(wheel_radius > 0.0, "wheel_radius must be positive");
  require(frontal_area > 0.0, "frontal_area must be positive");
  require(air_density > 0.0, "air_density must be positive");
  require(gravity > 0.0, "gravity must be positive");
  require(drag_coeff >= 0.0 && rolling_c1 >= 0.0 && rolling_c2 >= 0.0,
          "resistance coefficients must be non-negative");
  require(final_drive > 0.0, "final_drive must be positive");
  for (int g = 0; g < kGearCount; ++g) {
    require(gearbox_ratios[g] > 0.0, "gearbox ratios must be positive");
    if (g > 0) {
      require(gearbox_ratios[g] < gearbox_ratios[g - 1],
              "gearbox ratios must decrease strictly with gear number");
    }
  }
  require(engine_torque_min <= 0.0 && engine_torque_max >= 0.0,
          "engine torque limits must bracket zero");
  require(brake_torque_min == 0.0 && brake_torque_max >= 0.0,
          "brake torque limits must be [0, max]");
  require(engine_speed_max > 0.0, "engine_speed_max must be positive");
  require(accel_min < accel_max, "accel_min must be below accel_max");
}

double gear_ratio(const VehicleParams& params, int gear) {
  if (gear < 1 || gear > kGearCount) {
    throw std::invalid_argument("gear must be in 1.." + std::to_string(kGearCount) + ", got " +
                                std::to_string(gear));
  }
  return params.gearbox_ratios[gear - 1] * params.final_drive;
}

double engine_speed(double velocity, double ratio, double wheel_radius) {
  return velocity * ratio / wheel_radius;
}

double resistance_force(const VehicleParams& p, double velocity, double grade) {
  const double rolling = p.mass * p.gravity * std::cos(grade) * (p.rolling_c1 + p.rolling_c2 * velocity);
  const double climbing = p.mass * p.gravity * std::sin(grade);
  const double aero = 0.5 * p.air_density * p.frontal_area * p.drag_coeff * velocity * velocity;
  return rolling + climbing + aero;
}

double acceleration(const VehicleParams& p, double velocity, double engine_torque,
                    double brake_torque, int gear, double grade) {
  if (engine_torque < p.engine_torque_min - kTorqueTolerance ||
      engine_torque > p.engine_torque_max + kTorqueTolerance) {
    throw ConstraintViolation("engine torque " + std::to_string(engine_torque) +
                              " N*m outside [" + std::to_string(p.engine_torque_min) + ", " +
                              std::to_string(p.engine_torque_max) + "]");
  }
  if (brake_torque < p.brake_torque_min - kTorqueTolerance ||
      brake_torque > p.brake_torque_max + kTorqueTolerance) {
    throw ConstraintViolation("brake torque " + std::to_string(brake_torque) + " N*m outside [" +
                              std::to_string(p.brake_torque_min) + ", " +
                              std::to_string(p.brake_torque_max) + "]");
  }
  const double traction = gear_ratio(p, gear) * engine_torque / p.wheel_radius;
  const double braking = brake_torque / p.wheel_radius;
  const double a = (traction - resistance_force(p, velocity, grade) - braking) / p.mass;
  if (velocity <= 0.0 && a < 0.0) return 0.0;
  return a;
}

std::optional<double> bsfc(double engine_torque, double engine_speed, double fuel_rate) {
  const double power = engine_torque * engine_speed;  // W
  if (!(power > 0.0)) return std::nullopt;
  return fuel_rate * 3600.0 * 1000.0 / power;
}

}  // namespace ecodrive
