#include "gausstat/types.hpp"

namespace gausstat {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::SectorMismatch: return "sector-mismatch";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Numerical: return "numerical-failure";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::UnsupportedOrder:
    case ErrorKind::InsufficientData:
      return 2;
    case ErrorKind::UndefinedCorrelation:
    case ErrorKind::Infeasible:
    case ErrorKind::Inconsistent:
    case ErrorKind::SectorMismatch:
      return 3;
    case ErrorKind::Truncation:
    case ErrorKind::Numerical:
      return 4;
  }
  return 4;
}

} // namespace gausstat
