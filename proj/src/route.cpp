#include "ecodrive/route.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {
constexpr double kTileTolerance = 1e-9;
}

PiecewiseConstant::PiecewiseConstant(std::vector<Segment> segments) : segments_(std::move(segments)) {}

PiecewiseConstant PiecewiseConstant::constant(double length, double value) {
  return PiecewiseConstant({{0.0, length, value}});
}

double PiecewiseConstant::at(double distance) const {
  if (segments_.empty()) throw ConfigError("empty piecewise profile");
  for (const auto& s : segments_) {
    if (distance < s.end) return s.value;
  }
  return segments_.back().value;
}

double PiecewiseConstant::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) m = std::min(m, s.value);
  return m;
}

double PiecewiseConstant::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) m = std::max(m, s.value);
  return m;
}

namespace {

void check_tiling(const PiecewiseConstant& profile, double length, const std::string& name) {
  const auto& segs = profile.segments();
  if (segs.empty()) throw ConfigError("route." + name + ": no segments");
  if (std::abs(segs.front().start) > kTileTolerance) {
    throw ConfigError("route." + name + "[0]: must start at 0");
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string where = "route." + name + "[" + std::to_string(i) + "]";
    if (!(segs[i].end > segs[i].start)) throw ConfigError(where + ": end must exceed start");
    if (!std::isfinite(segs[i].value)) throw ConfigError(where + ": value must be finite");
    if (i > 0 && std::abs(segs[i].start - segs[i - 1].end) > kTileTolerance) {
      throw ConfigError(where + ": segments must tile the route without gaps or overlaps");
    }
  }
  if (std::abs(segs.back().end - length) > kTileTolerance) {
    throw ConfigError("route." + name + ": segments must end at the route length");
  }
}

}  // namespace

void Route::validate() const {
  if (!(length > 0.0)) throw ConfigError("route.length must be positive");
  if (!(deadline > 0.0)) throw ConfigError("route.deadline must be positive");
  check_tiling(speed_min, length, "speed_limits.min");
  check_tiling(speed_max, length, "speed_limits.max");
  check_tiling(grade, length, "grade");
  for (std::size_t i = 0; i < speed_min.segments().size(); ++i) {
    if (speed_min.segments()[i].value < 0.0) {
      throw ConfigError("route.speed_limits.min[" + std::to_string(i) + "]: must be non-negative");
    }
  }
  if (!(speed_max.min_value() > 0.0)) throw ConfigError("route.speed_limits.max: must be positive");
  for (std::size_t i = 0; i < signals.size(); ++i) {
    const SignalSpec& s = signals[i];
    const std::string where = "route.signals[" + std::to_string(i) + "]";
    if (!(s.position > 0.0) || s.position > length + kTileTolerance) {
      throw ConfigError(where + ": position " + std::to_string(s.position) +
                        " m outside (0, route length " + std::to_string(length) + "]");
    }
    if (i > 0 && !(s.position > signals[i - 1].position)) {
      throw ConfigError(where + ": positions must increase strictly");
    }
    if (s.kind == SignalKind::stop) continue;
    if (!(s.cycle_period > 0.0)) throw ConfigError(where + ": cycle_period must be positive");
    if (s.base_red < 0.0 || s.base_red > s.cycle_period) {
      throw ConfigError(where + ": base_red must lie in [0, cycle_period]");
    }
    if (s.clock_offset < 0.0 || s.clock_offset >= s.cycle_period) {
      throw ConfigError(where + ": clock_offset must lie in [0, cycle_period)");
    }
    if (s.delay) {
      if (s.delay->lo() < 0.0 || s.delay->hi() > s.cycle_period - s.base_red + kTileTolerance) {
        throw ConfigError(where + ": delay support must lie in [0, cycle_period - base_red]");
      }
    }
  }
}

}  // namespace ecodrive
