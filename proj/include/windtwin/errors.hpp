#pragma once

#include <stdexcept>
#include <string>

namespace windtwin {

// Error categories map 1:1 onto CLI exit codes (see tools/).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file structure (bad header, unknown column).
struct FormatError : ValidationError {
  explicit FormatError(const std::string& msg) : ValidationError(msg) {}
};

// Numeric failures: domain violations, training divergence.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace windtwin
