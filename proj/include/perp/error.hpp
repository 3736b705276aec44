#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perp {

enum class ErrorCode {
  InvalidInput,
  InvalidArguments,
  InvalidModel,
  ExponentOverflow,
  RangeError,
  DomainError,
  Unsupported,
  Unavailable,
  TooLarge,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers (the CLI in
/// particular) which failure class occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace perp
