#pragma once

#include <stdexcept>
#include <string>

namespace unilab {

enum class ErrorCode {
  PoleAtOne,
  BudgetExceeded,
  ZeroOnPath,
  TableTooSmall,
  PrimeOutOfRange,
  QuadratureNotConverged,
  InvalidArgument,
  Validation,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers switch on code().
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

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace unilab
