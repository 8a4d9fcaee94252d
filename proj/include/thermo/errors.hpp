#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Bad input: violated preconditions, malformed specs, failed hypotheses.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a meaningful number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace thermo
