#include "ecodrive/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <limits>

namespace ecodrive::kernels {

namespace {

inline float64x2_t periodic_clock2(float64x2_t offset, float64x2_t period, float64x2_t t) {
  const float64x2_t x = vaddq_f64(offset, t);
  const float64x2_t q = vrndmq_f64(vdivq_f64(x, period));
  float64x2_t r = vsubq_f64(x, vmulq_f64(period, q));
  const float64x2_t zero = vdupq_n_f64(0.0);
  r = vbslq_f64(vcltq_f64(r, zero), vaddq_f64(r, period), r);
  r = vbslq_f64(vcgeq_f64(r, period), vsubq_f64(r, period), r);
  return r;
}

}  // namespace

void relax_row_neon(const RowRelaxation& row, const double* times, double* best,
                    std::uint16_t* choice, std::uint16_t control) {
  const double tw = row.time_weight;
  const double vw = row.velocity_weight;
  const bool time_blend = tw > 0.0;
  const bool velocity_blend = vw > 0.0;
  const double* lo = row.row_lo + row.shift;
  const double* hi = row.row_hi ? row.row_hi + row.shift : nullptr;

  const float64x2_t v_tw = vdupq_n_f64(tw);
  const float64x2_t v_tw_c = vdupq_n_f64(1.0 - tw);
  const float64x2_t v_vw = vdupq_n_f64(vw);
  const float64x2_t v_vw_c = vdupq_n_f64(1.0 - vw);
  const float64x2_t v_stage = vdupq_n_f64(row.stage_cost);
  const float64x2_t v_cpt = vdupq_n_f64(row.cost_per_time);
  const float64x2_t v_elapsed = vdupq_n_f64(row.elapsed);
  const float64x2_t v_inf = vdupq_n_f64(std::numeric_limits<double>::infinity());
  float64x2_t g_offset = vdupq_n_f64(0.0);
  float64x2_t g_period = vdupq_n_f64(1.0);
  float64x2_t g_threshold = vdupq_n_f64(0.0);
  if (row.gate != nullptr) {
    g_offset = vdupq_n_f64(row.gate->offset);
    g_period = vdupq_n_f64(row.gate->period);
    g_threshold = vdupq_n_f64(row.gate->threshold);
  }

  const std::size_t n = row.valid;
  const std::size_t n2 = n & ~std::size_t{1};
  std::size_t j = 0;
  for (; j < n2; j += 2) {
    float64x2_t a = vld1q_f64(lo + j);
    if (time_blend) a = vaddq_f64(vmulq_f64(a, v_tw_c), vmulq_f64(vld1q_f64(lo + j + 1), v_tw));
    float64x2_t value = a;
    if (velocity_blend) {
      float64x2_t b = vld1q_f64(hi + j);
      if (time_blend) b = vaddq_f64(vmulq_f64(b, v_tw_c), vmulq_f64(vld1q_f64(hi + j + 1), v_tw));
      value = vaddq_f64(vmulq_f64(a, v_vw_c), vmulq_f64(b, v_vw));
    }
    const float64x2_t t = vld1q_f64(times + j);
    float64x2_t candidate = vaddq_f64(vaddq_f64(v_stage, vmulq_f64(v_cpt, t)), value);
    if (row.gate != nullptr) {
      const float64x2_t clock = periodic_clock2(g_offset, g_period, vaddq_f64(t, v_elapsed));
      candidate = vbslq_f64(vcgeq_f64(clock, g_threshold), candidate, v_inf);
    }
    const float64x2_t current = vld1q_f64(best + j);
    const uint64x2_t better = vcltq_f64(candidate, current);
    vst1q_f64(best + j, vbslq_f64(better, candidate, current));
    if (vgetq_lane_u64(better, 0)) choice[j] = control;
    if (vgetq_lane_u64(better, 1)) choice[j + 1] = control;
  }
  if (j < n) {
    RowRelaxation tail = row;
    tail.row_lo = row.row_lo + j;
    tail.row_hi = row.row_hi ? row.row_hi + j : nullptr;
    tail.valid = n - j;
    relax_row_scalar(tail, times + j, best + j, choice + j, control);
  }
}

}  // namespace ecodrive::kernels

#else

#include <cstdlib>

namespace ecodrive::kernels {

void relax_row_neon(const RowRelaxation&, const double*, double*, std::uint16_t*, std::uint16_t) {
  std::abort();
}

}  // namespace ecodrive::kernels

#endif
