#include "ecodrive/fuel_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw ConfigError(std::string("fuel map: ") + name + " needs at least 2 points");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ConfigError(std::string("fuel map: ") + name + " must be strictly increasing");
    }
  }
}

// Index of the cell containing x, clamped to the axis; returns the fraction
// within the cell.
std::size_t locate(const std::vector<double>& axis, double x, double& frac) {
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  if (i >= axis.size() - 1) i = axis.size() - 2;
  frac = (x - axis[i]) / (axis[i + 1] - axis[i]);
  return i;
}

std::vector<double> split_csv(const std::string& line, std::size_t line_no, bool allow_label_first) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  bool first = true;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    if (first && allow_label_first) {
      first = false;
      continue;
    }
    first = false;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("fuel map CSV line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
  }
  return values;
}

}  // namespace

FuelMap::FuelMap(std::vector<double> torque_axis, std::vector<double> speed_axis,
                 std::vector<double> rate_table)
    : torque_axis_(std::move(torque_axis)),
      speed_axis_(std::move(speed_axis)),
      table_(std::move(rate_table)) {
  check_axis(torque_axis_, "torque axis");
  check_axis(speed_axis_, "speed axis");
  if (table_.size() != torque_axis_.size() * speed_axis_.size()) {
    throw ConfigError("fuel map: rate table size does not match the axes");
  }
  for (double r : table_) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("fuel map: rates must be finite and non-negative");
  }
  if (torque_axis_.front() != 0.0 || speed_axis_.front() != 0.0) {
    throw ConfigError("fuel map: axes must start at zero torque and zero speed");
  }
}

FuelMap::FuelMap(const FuelMap& other)
    : torque_axis_(other.torque_axis_),
      speed_axis_(other.speed_axis_),
      table_(other.table_),
      overrun_(other.overrun_) {}

FuelMap& FuelMap::operator=(const FuelMap& other) {
  torque_axis_ = other.torque_axis_;
  speed_axis_ = other.speed_axis_;
  table_ = other.table_;
  overrun_ = other.overrun_;
  clamped_.store(0, std::memory_order_relaxed);
  return *this;
}

bool FuelMap::operator==(const FuelMap& other) const {
  return torque_axis_ == other.torque_axis_ && speed_axis_ == other.speed_axis_ &&
         table_ == other.table_ && overrun_ == other.overrun_;
}

double FuelMap::rate(double engine_torque, double engine_speed) const {
  if (engine_torque < 0.0) {
    if (overrun_ == OverrunFuel::cut) return 0.0;
    engine_torque = 0.0;
  }
  if (engine_torque > torque_axis_.back() || engine_speed < 0.0 ||
      engine_speed > speed_axis_.back()) {
    clamped_.fetch_add(1, std::memory_order_relaxed);
  }
  const double torque = std::clamp(engine_torque, torque_axis_.front(), torque_axis_.back());
  const double speed = std::clamp(engine_speed, speed_axis_.front(), speed_axis_.back());
  double ft = 0.0;
  double fs = 0.0;
  const std::size_t i = locate(torque_axis_, torque, ft);
  const std::size_t j = locate(speed_axis_, speed, fs);
  const double r00 = node(i, j);
  const double r01 = node(i, j + 1);
  const double r10 = node(i + 1, j);
  const double r11 = node(i + 1, j + 1);
  if (ft == 0.0 && fs == 0.0) return r00;
  const double low = r00 + (r01 - r00) * fs;
  const double high = r10 + (r11 - r10) * fs;
  return low + (high - low) * ft;
}

FuelMap FuelMap::synthetic(const SyntheticMapParams& p) {
  if (p.torque_points < 2 || p.speed_points < 2 || !(p.torque_max > 0.0) || !(p.speed_max > 0.0)) {
    throw ConfigError("synthetic fuel map: invalid extent");
  }
  if (!(p.peak_efficiency > 0.0 && p.peak_efficiency < 1.0) || !(p.efficiency_floor > 0.0) ||
      p.efficiency_floor > p.peak_efficiency || !(p.heating_value > 0.0) || p.idle_rate < 0.0 ||
      p.friction_rate < 0.0) {
    throw ConfigError("synthetic fuel map: invalid efficiency model");
  }
  std::vector<double> torque(static_cast<std::size_t>(p.torque_points));
  std::vector<double> speed(static_cast<std::size_t>(p.speed_points));
  for (int i = 0; i < p.torque_points; ++i) torque[i] = p.torque_max * i / (p.torque_points - 1);
  for (int j = 0; j < p.speed_points; ++j) speed[j] = p.speed_max * j / (p.speed_points - 1);
  std::vector<double> table;
  table.reserve(torque.size() * speed.size());
  for (double t : torque) {
    for (double w : speed) {
      const double dt = (t - p.bowl_torque) / p.torque_max;
      const double dw = (w - p.bowl_speed) / p.speed_max;
      const double eff = std::max(
          p.efficiency_floor,
          p.peak_efficiency * (1.0 - p.torque_curvature * dt * dt - p.speed_curvature * dw * dw));
      table.push_back(p.idle_rate + p.friction_rate * w + t * w / (eff * p.heating_value));
    }
  }
  return FuelMap(std::move(torque), std::move(speed), std::move(table));
}

FuelMap FuelMap::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("fuel map: cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> speed;
  std::vector<double> torque;
  std::vector<double> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    if (speed.empty()) {
      speed = split_csv(line, line_no, true);
      continue;
    }
    auto row = split_csv(line, line_no, false);
    if (row.size() != speed.size() + 1) {
      throw ConfigError("fuel map CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(speed.size() + 1) + " cells");
    }
    torque.push_back(row.front());
    table.insert(table.end(), row.begin() + 1, row.end());
  }
  return FuelMap(std::move(torque), std::move(speed), std::move(table));
}

void FuelMap::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("fuel map: cannot write " + path.string());
  out << std::setprecision(17) << "torque_nm\\speed_radps";
  for (double w : speed_axis_) out << ',' << w;
  out << '\n';
  for (std::size_t i = 0; i < torque_axis_.size(); ++i) {
    out << torque_axis_[i];
    for (std::size_t j = 0; j < speed_axis_.size(); ++j) out << ',' << node(i, j);
    out << '\n';
  }
}

}  // namespace ecodrive
