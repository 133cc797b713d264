#pragma once
#include <stdexcept>
#include <string>

namespace fgnam {

/// Runtime failure in data or numerics (CLI exit code 1).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration or usage (CLI exit code 2).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fgnam
