#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

// Row relaxation kernels for the backward induction. For one (velocity,
// control) pair the successor velocity and elapsed time do not depend on the
// departure time, so a whole time row of candidate costs is a shifted blend of
// two or four rows of the next stage's cost-to-go. The scalar kernel is the
// reference; SIMD variants must agree with it bit for bit.
namespace ecodrive::kernels {

enum class Isa { scalar, avx2, neon };

// Clock test applied to arrival times t_j + elapsed:
// periodic_clock(offset, period, t) >= threshold.
struct GateWindow {
  double offset = 0.0;
  double period = 1.0;
  double threshold = 0.0;
};

struct RowRelaxation {
  const double* row_lo = nullptr;   // next-stage costs at the lower velocity node
  const double* row_hi = nullptr;   // upper velocity node; unused when velocity_weight == 0
  double velocity_weight = 0.0;     // weight of row_hi, in [0, 1)
  std::size_t shift = 0;            // time-index offset of the lower time node
  double time_weight = 0.0;         // weight of the upper time node, in [0, 1)
  std::size_t valid = 0;            // lanes [0, valid) have in-range source nodes
  double stage_cost = 0.0;
  double cost_per_time = 0.0;       // candidate += cost_per_time * t_j
  double elapsed = 0.0;             // stage duration, for the gate
  const GateWindow* gate = nullptr;
};

using RelaxFn = void (*)(const RowRelaxation& row, const double* times, double* best,
                         std::uint16_t* choice, std::uint16_t control);

void relax_row_scalar(const RowRelaxation& row, const double* times, double* best,
                      std::uint16_t* choice, std::uint16_t control);
void relax_row_avx2(const RowRelaxation& row, const double* times, double* best,
                    std::uint16_t* choice, std::uint16_t control);
void relax_row_neon(const RowRelaxation& row, const double* times, double* best,
                    std::uint16_t* choice, std::uint16_t control);

bool isa_compiled(Isa isa);
bool isa_available(Isa isa);
Isa best_isa();
RelaxFn relax_kernel(Isa isa);
std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

}  // namespace ecodrive::kernels
