#include "unilab/error.hpp"

#include <cmath>

#include "unilab/types.hpp"

namespace unilab {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PoleAtOne: return "PoleAtOne";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ZeroOnPath: return "ZeroOnPath";
    case ErrorCode::TableTooSmall: return "TableTooSmall";
    case ErrorCode::PrimeOutOfRange: return "PrimeOutOfRange";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

GridSweep GridSweep::window(double T, double step) {
  require(T > 0.0 && step > 0.0, "window: T and step must be positive");
  GridSweep g;
  g.t0 = T;
  g.step = step;
  g.count = static_cast<std::int64_t>(std::llround(T / step));
  g.validate();
  return g;
}

void GridSweep::validate() const {
  require(std::isfinite(t0), "grid: t0 must be finite");
  require(std::isfinite(step) && step > 0.0, "grid: step must be positive");
  require(count > 0, "grid: count must be positive");
}

}  // namespace unilab
