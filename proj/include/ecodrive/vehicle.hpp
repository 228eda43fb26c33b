#pragma once

#include <array>
#include <optional>

namespace ecodrive {

inline constexpr int kGearCount = 6;

// Longitudinal model parameters. Defaults are the compact-car values used in
// the reference study; limits it leaves unstated are chosen here and
// documented in the README.
struct VehicleParams {
  double mass = 1745.0;            // kg
  double wheel_radius = 0.3413;    // m
  double frontal_area = 2.841;     // m^2
  double air_density = 1.1985;     // kg/m^3
  double drag_coeff = 0.356;
  double rolling_c1 = 0.0084;
  double rolling_c2 = 1.2e-4;      // s/m
  double gravity = 9.81;           // m/s^2
  double final_drive = 3.51;
  std::array<double, kGearCount> gearbox_ratios{4.584, 2.964, 1.912, 1.446, 1.0, 0.74};
  double engine_torque_min = -40.0;  // N*m, engine drag (fuel cut)
  double engine_torque_max = 240.0;  // N*m
  double engine_speed_max = 600.0;   // rad/s
  double brake_torque_min = 0.0;     // N*m at the wheel
  double brake_torque_max = 2000.0;  // N*m at the wheel
  double accel_min = -20.0;          // m/s^2, non-binding by default
  double accel_max = 20.0;           // m/s^2, non-binding by default

  // Throws ConfigError when an invariant does not hold.
  void validate() const;

  bool operator==(const VehicleParams&) const = default;
};

// Integrated gearbox x final-drive ratio. Gear is 1-based.
double gear_ratio(const VehicleParams& params, int gear);

// Engine crank speed for a road speed: v * r_gb / R_whl.
double engine_speed(double velocity, double ratio, double wheel_radius);

// Sum of rolling, grade and aerodynamic resistance forces (N) at speed v.
double resistance_force(const VehicleParams& params, double velocity, double grade);

// Longitudinal acceleration from engine torque, wheel brake torque, gear and
// road grade. At standstill a net retarding force cannot move the vehicle
// backwards, so the result is clamped at zero.
// Throws ConstraintViolation when a torque is outside its limits.
double acceleration(const VehicleParams& params, double velocity, double engine_torque,
                    double brake_torque, int gear, double grade);

// Brake specific fuel consumption in g/kWh; nullopt when the mechanical
// power is not positive.
std::optional<double> bsfc(double engine_torque, double engine_speed, double fuel_rate);

}  // namespace ecodrive
