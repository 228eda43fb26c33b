#pragma once

#include <span>

#include "ecodrive/dp_solver.hpp"
#include "ecodrive/route.hpp"
#include "ecodrive/trajectory.hpp"

namespace ecodrive {

// Third term of the desired gap: `preview` uses v * D_sf (the form printed in
// the modified model), `standard` uses v * dv with the obstacle at rest.
enum class GapForm { preview, standard };

struct IdmParams {
  double min_gap = 2.0;            // m
  double headway = 1.5;            // s
  double comfort_decel = 2.0;      // m/s^2
  double max_accel = 2.0;          // m/s^2
  double desired_speed = 16.0;     // m/s
  double vision_distance = 100.0;  // m
  double timestep = 0.1;           // s
  GapForm gap_form = GapForm::preview;
  double horizon_factor = 10.0;    // abort after this multiple of free-flow time

  void validate() const;
  bool operator==(const IdmParams&) const = default;
};

// Desired gap, never below the minimum gap.
double desired_gap(const IdmParams& p, double velocity, double gap);

// signal_ahead: a red signal or a stop line lies within the vision distance.
// Free road is gap = +infinity.
double idm_acceleration(const IdmParams& p, double velocity, double gap, bool signal_ahead);

// Gear the shift schedule selects at `velocity` starting from `current`:
// upshift once the crank exceeds 0.75 * w_max * gear / 6, downshift when the
// lower gear would sit 10 % below its own upshift point.
int scheduled_gear(const VehicleParams& params, double velocity, int current);

// Time-domain forward simulation. `delays` holds the realised delay per
// route signal (0 for deterministic runs, ignored for stop signs); an empty
// span means all zero. Throws SimulationError past the time horizon.
Trajectory simulate_idm(const Route& route, const Vehicle& vehicle, const IdmParams& p,
                        std::span<const double> delays = {});

}  // namespace ecodrive
