// Error categories shared across the library and mapped to CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace xxzbath {

// Input exceeds a documented size/work cap (CLI exit code 3).
struct ResourceCapError : std::runtime_error {
  explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

// A self-check or verification suite failed (CLI exit code 2).
struct VerificationError : std::runtime_error {
  explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xxzbath
