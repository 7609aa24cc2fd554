#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace im2colsim {

enum class ErrorCode {
  Shape,     // tensor / spec dimensions inconsistent
  Capacity,  // on-chip memory cannot hold the required working set
  Config,    // invalid configuration values
  Parse,     // malformed input file
  Mismatch,  // functional result differs from the oracle
  Internal,  // broken invariant inside the simulator
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Shape: return "E_SHAPE";
    case ErrorCode::Capacity: return "E_CAPACITY";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Mismatch: return "E_MISMATCH";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace im2colsim
