#pragma once

#include <stdexcept>
#include <string>

namespace riskmono {

enum class ErrorCode {
  InvalidArgument,   // malformed configuration or caller input
  InvalidSplit,
  InvalidSubsample,
  InfeasibleEta,
  Numeric,           // non-finite data or arithmetic domain violation
  Domain,            // evaluation outside a function's domain
  Solver,            // iterative solver failed to converge or bracket
  Io,
};

const char* to_string(ErrorCode code) noexcept;

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

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace riskmono
