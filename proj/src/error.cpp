#include "invcorr/error.hpp"

namespace invcorr {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::validation: return "validation";
    case ErrorCode::construction: return "construction";
    case ErrorCode::structure: return "structure";
    case ErrorCode::admissibility: return "admissibility";
    case ErrorCode::parameter: return "parameter";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::weight_sum: return "weight_sum";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace invcorr
