#include <stdexcept>
#include <string>

#include "ecodrive/kernels.hpp"

namespace ecodrive::kernels {

RelaxFn relax_kernel(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel '" + std::string(isa_name(isa)) + "' not available on this CPU");
  }
  switch (isa) {
    case Isa::scalar:
      return &relax_row_scalar;
    case Isa::avx2:
      return &relax_row_avx2;
    case Isa::neon:
      return &relax_row_neon;
  }
  return &relax_row_scalar;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

}  // namespace ecodrive::kernels
