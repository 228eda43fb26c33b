#pragma once

#include <atomic>
#include <filesystem>
#include <vector>

namespace ecodrive {

// Shape of the default synthetic engine map: a Willans-line fuel model with
// an efficiency bowl centred at mid torque and speed.
struct SyntheticMapParams {
  double idle_rate = 0.30;             // g/s at zero torque and zero speed
  double friction_rate = 0.0008;       // g/s per rad/s of crank speed
  double peak_efficiency = 0.40;       // indicated efficiency at the bowl centre
  double bowl_torque = 150.0;          // N*m
  double bowl_speed = 250.0;           // rad/s
  double torque_curvature = 1.2;
  double speed_curvature = 1.0;
  double efficiency_floor = 0.12;
  double heating_value = 43000.0;      // J/g
  double torque_max = 240.0;           // N*m, map extent
  double speed_max = 600.0;            // rad/s, map extent
  int torque_points = 25;
  int speed_points = 25;

  bool operator==(const SyntheticMapParams&) const = default;
};

// What a negative (drag) engine torque burns: the zero-torque column of the
// map, or nothing when the injectors cut off on overrun.
enum class OverrunFuel { zero_torque_column, cut };

// Tabulated engine fuel rate (g/s) over a torque x speed grid with bilinear
// interpolation.
class FuelMap {
 public:
  // rate_table is row-major: one row per torque axis entry.
  FuelMap(std::vector<double> torque_axis, std::vector<double> speed_axis,
          std::vector<double> rate_table);
  FuelMap(const FuelMap& other);
  FuelMap& operator=(const FuelMap& other);

  static FuelMap synthetic(const SyntheticMapParams& params = {});

  // CSV layout: first row holds the speed axis after a corner cell, every
  // following row is a torque value and its fuel rates.
  static FuelMap load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

  double rate(double engine_torque, double engine_speed) const;
  double idle_rate() const { return table_[0]; }

  OverrunFuel overrun() const { return overrun_; }
  void set_overrun(OverrunFuel overrun) { overrun_ = overrun; }

  const std::vector<double>& torque_axis() const { return torque_axis_; }
  const std::vector<double>& speed_axis() const { return speed_axis_; }
  const std::vector<double>& rate_table() const { return table_; }
  double node(std::size_t torque_index, std::size_t speed_index) const {
    return table_[torque_index * speed_axis_.size() + speed_index];
  }

  // Number of lookups that fell outside the axes and were clamped.
  std::uint64_t clamp_count() const { return clamped_.load(std::memory_order_relaxed); }

  bool operator==(const FuelMap& other) const;

 private:
  std::vector<double> torque_axis_;
  std::vector<double> speed_axis_;
  std::vector<double> table_;
  OverrunFuel overrun_ = OverrunFuel::zero_torque_column;
  mutable std::atomic<std::uint64_t> clamped_{0};
};

}  // namespace ecodrive
