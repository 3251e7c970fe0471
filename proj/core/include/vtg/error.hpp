#pragma once

#include <stdexcept>
#include <string>

namespace vtg {

// Base class for all recoverable errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Composing or inverting transforms whose frame labels do not chain.
class FrameMismatchError : public Error {
 public:
  explicit FrameMismatchError(const std::string& what) : Error(what) {}
};

// Malformed or unreadable input files; message carries a line number
// whenever one is available.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Invalid configuration values or unknown override keys.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Numerically degenerate input (collinear samples, empty neighborhoods, ...).
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

// Motion goals that violate preconditions (unreachable, unsafe, low
// confidence).
class PlanningError : public Error {
 public:
  explicit PlanningError(const std::string& what) : Error(what) {}
};

}  // namespace vtg
