#pragma once

#include <stdexcept>
#include <string>

namespace invcorr {

// Stable error codes; the CLI serializes these verbatim into error objects.
enum class ErrorCode {
  dimension,
  validation,
  construction,
  structure,
  admissibility,
  parameter,
  capacity,
  weight_sum,
  infeasible,
  numerical,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace invcorr
