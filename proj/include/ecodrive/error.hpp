#pragma once

#include <stdexcept>
#include <string>

namespace ecodrive {

// Invalid or inconsistent configuration (parameters, distributions, grids).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physical limit (torque, brake, speed) was exceeded by a caller.
class ConstraintViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant broken, e.g. a replayed policy hit an infeasible state.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Forward simulation exceeded its time horizon.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ecodrive
