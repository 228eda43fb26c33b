#include "ecodrive/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <limits>

namespace ecodrive::kernels {

namespace {

__attribute__((target("avx2"))) inline __m256d periodic_clock4(__m256d offset, __m256d period,
                                                               __m256d t) {
  const __m256d x = _mm256_add_pd(offset, t);
  const __m256d q = _mm256_floor_pd(_mm256_div_pd(x, period));
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(period, q));
  const __m256d zero = _mm256_setzero_pd();
  r = _mm256_blendv_pd(r, _mm256_add_pd(r, period), _mm256_cmp_pd(r, zero, _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, _mm256_sub_pd(r, period), _mm256_cmp_pd(r, period, _CMP_GE_OQ));
  return r;
}

}  // namespace

__attribute__((target("avx2"))) void relax_row_avx2(const RowRelaxation& row, const double* times,
                                                    double* best, std::uint16_t* choice,
                                                    std::uint16_t control) {
  const double tw = row.time_weight;
  const double vw = row.velocity_weight;
  const bool time_blend = tw > 0.0;
  const bool velocity_blend = vw > 0.0;
  const double* lo = row.row_lo + row.shift;
  const double* hi = row.row_hi ? row.row_hi + row.shift : nullptr;

  const __m256d v_tw = _mm256_set1_pd(tw);
  const __m256d v_tw_c = _mm256_set1_pd(1.0 - tw);
  const __m256d v_vw = _mm256_set1_pd(vw);
  const __m256d v_vw_c = _mm256_set1_pd(1.0 - vw);
  const __m256d v_stage = _mm256_set1_pd(row.stage_cost);
  const __m256d v_cpt = _mm256_set1_pd(row.cost_per_time);
  const __m256d v_elapsed = _mm256_set1_pd(row.elapsed);
  const __m256d v_inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d g_offset = _mm256_setzero_pd();
  __m256d g_period = _mm256_set1_pd(1.0);
  __m256d g_threshold = _mm256_setzero_pd();
  if (row.gate != nullptr) {
    g_offset = _mm256_set1_pd(row.gate->offset);
    g_period = _mm256_set1_pd(row.gate->period);
    g_threshold = _mm256_set1_pd(row.gate->threshold);
  }

  const std::size_t n = row.valid;
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t j = 0;
  for (; j < n4; j += 4) {
    __m256d a = _mm256_loadu_pd(lo + j);
    if (time_blend) {
      a = _mm256_add_pd(_mm256_mul_pd(a, v_tw_c), _mm256_mul_pd(_mm256_loadu_pd(lo + j + 1), v_tw));
    }
    __m256d value = a;
    if (velocity_blend) {
      __m256d b = _mm256_loadu_pd(hi + j);
      if (time_blend) {
        b = _mm256_add_pd(_mm256_mul_pd(b, v_tw_c), _mm256_mul_pd(_mm256_loadu_pd(hi + j + 1), v_tw));
      }
      value = _mm256_add_pd(_mm256_mul_pd(a, v_vw_c), _mm256_mul_pd(b, v_vw));
    }
    const __m256d t = _mm256_loadu_pd(times + j);
    __m256d candidate = _mm256_add_pd(_mm256_add_pd(v_stage, _mm256_mul_pd(v_cpt, t)), value);
    if (row.gate != nullptr) {
      const __m256d clock = periodic_clock4(g_offset, g_period, _mm256_add_pd(t, v_elapsed));
      candidate = _mm256_blendv_pd(v_inf, candidate, _mm256_cmp_pd(clock, g_threshold, _CMP_GE_OQ));
    }
    const __m256d current = _mm256_loadu_pd(best + j);
    const __m256d better = _mm256_cmp_pd(candidate, current, _CMP_LT_OQ);
    const int mask = _mm256_movemask_pd(better);
    if (mask != 0) {
      _mm256_storeu_pd(best + j, _mm256_blendv_pd(current, candidate, better));
      for (int k = 0; k < 4; ++k) {
        if (mask & (1 << k)) choice[j + k] = control;
      }
    }
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

void relax_row_avx2(const RowRelaxation&, const double*, double*, std::uint16_t*, std::uint16_t) {
  std::abort();
}

}  // namespace ecodrive::kernels

#endif
