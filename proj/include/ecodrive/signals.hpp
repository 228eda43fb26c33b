#pragma once

#include <cmath>
#include <optional>

#include "ecodrive/distribution.hpp"

namespace ecodrive {

enum class SignalKind { signal, stop };

// A signalised intersection or a stop sign on the route. Each signal runs an
// independent periodic clock; clock zero is the start of the red phase.
struct SignalSpec {
  double position = 0.0;      // m from the origin
  SignalKind kind = SignalKind::signal;
  double cycle_period = 60.0;  // s
  double base_red = 30.0;      // s
  double clock_offset = 0.0;   // clock reading at departure, s
  std::optional<DelayDistribution> delay;

  bool operator==(const SignalSpec&) const = default;
};

// (offset + t) mod period, computed the same way by every kernel so the gate
// decisions of the solver and of post-hoc checks agree bit for bit.
inline double periodic_clock(double offset, double period, double t) {
  const double x = offset + t;
  double r = x - period * std::floor(x / period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double clock_time(const SignalSpec& sig, double passing_time);

bool is_green_deterministic(const SignalSpec& sig, double passing_time);

// Red duration tightened to the eta-quantile of the delay:
// base_red + F^-1(eta). Throws ConfigError without a delay distribution.
double effective_red(const SignalSpec& sig, double eta);

// Clock threshold a passing must reach: the base red for deterministic
// planning (eta == 0 or no delay law), effective_red otherwise.
double gate_threshold(const SignalSpec& sig, double eta);

// True when the vehicle enters during the realised effective red.
bool violates(const SignalSpec& sig, double passing_time, double realized_delay);

}  // namespace ecodrive
