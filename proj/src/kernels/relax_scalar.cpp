#include <limits>

#include "ecodrive/kernels.hpp"
#include "ecodrive/signals.hpp"

namespace ecodrive::kernels {

void relax_row_scalar(const RowRelaxation& row, const double* times, double* best,
                      std::uint16_t* choice, std::uint16_t control) {
  const double inf = std::numeric_limits<double>::infinity();
  const double tw = row.time_weight;
  const double tw_c = 1.0 - tw;
  const double vw = row.velocity_weight;
  const double vw_c = 1.0 - vw;
  const double* lo = row.row_lo + row.shift;
  const double* hi = row.row_hi ? row.row_hi + row.shift : nullptr;

  for (std::size_t j = 0; j < row.valid; ++j) {
    double a = lo[j];
    if (tw > 0.0) a = a * tw_c + lo[j + 1] * tw;
    double value = a;
    if (vw > 0.0) {
      double b = hi[j];
      if (tw > 0.0) b = b * tw_c + hi[j + 1] * tw;
      value = a * vw_c + b * vw;
    }
    double candidate = (row.stage_cost + row.cost_per_time * times[j]) + value;
    if (row.gate != nullptr) {
      const double clock = periodic_clock(row.gate->offset, row.gate->period, times[j] + row.elapsed);
      if (!(clock >= row.gate->threshold)) candidate = inf;
    }
    if (candidate < best[j]) {
      best[j] = candidate;
      choice[j] = control;
    }
  }
}

}  // namespace ecodrive::kernels
