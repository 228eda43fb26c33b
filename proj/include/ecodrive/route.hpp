#pragma once

#include <string>
#include <vector>

#include "ecodrive/signals.hpp"

namespace ecodrive {

// Piecewise-constant profile over [0, length]. Segment i covers
// [breaks[i], breaks[i+1]); the last segment also owns its right end.
class PiecewiseConstant {
 public:
  struct Segment {
    double start;
    double end;
    double value;
    bool operator==(const Segment&) const = default;
  };

  PiecewiseConstant() = default;
  explicit PiecewiseConstant(std::vector<Segment> segments);
  static PiecewiseConstant constant(double length, double value);

  double at(double distance) const;
  double min_value() const;
  double max_value() const;
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  bool operator==(const PiecewiseConstant&) const = default;

 private:
  std::vector<Segment> segments_;
};

struct Route {
  double length = 0.0;      // D_f, m
  double deadline = 0.0;    // t_f, s
  std::vector<SignalSpec> signals;  // strictly increasing positions
  PiecewiseConstant speed_min;
  PiecewiseConstant speed_max;
  PiecewiseConstant grade;  // rad

  // Throws ConfigError naming the offending item.
  void validate() const;

  bool operator==(const Route&) const = default;
};

}  // namespace ecodrive
