#pragma once

#include <stdexcept>
#include <string>

namespace kplane {

// Malformed arguments: wrong dimensions, out-of-range parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateSpan : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChartDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an integral is requested that does not exist (non-integrable
// input outside divergence mode, weight exponent outside the integrable range).
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kplane
