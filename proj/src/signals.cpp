#include "ecodrive/signals.hpp"

#include "ecodrive/error.hpp"

namespace ecodrive {

double clock_time(const SignalSpec& sig, double passing_time) {
  return periodic_clock(sig.clock_offset, sig.cycle_period, passing_time);
}

bool is_green_deterministic(const SignalSpec& sig, double passing_time) {
  return clock_time(sig, passing_time) >= sig.base_red;
}

double effective_red(const SignalSpec& sig, double eta) {
  if (!sig.delay) {
    throw ConfigError("signal at " + std::to_string(sig.position) + " m has no delay distribution");
  }
  return sig.base_red + sig.delay->inv_cdf(eta);
}

double gate_threshold(const SignalSpec& sig, double eta) {
  if (eta <= 0.0 || !sig.delay) return sig.base_red;
  return effective_red(sig, eta);
}

bool violates(const SignalSpec& sig, double passing_time, double realized_delay) {
  return clock_time(sig, passing_time) < sig.base_red + realized_delay;
}

}  // namespace ecodrive
