#pragma once

#include <stdexcept>
#include <string>

namespace rosenbench {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFiniteInput,
  NotAvailable,   // no closed form / no conditional decomposition for this family
  Numerical,
  Io,
  Parse,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rosenbench
