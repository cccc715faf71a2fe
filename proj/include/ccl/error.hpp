#pragma once

#include <stdexcept>
#include <string>

namespace ccl {

/// Error carrying a stable diagnostic code (e.g. "OVERFLOW", "ARITY_MISMATCH").
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string &code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace ccl
