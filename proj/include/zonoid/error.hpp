#pragma once

#include <stdexcept>
#include <string>

namespace zonoid {

// Precondition violations (bad shapes, grades, parameters) throw std::invalid_argument.
// Failures that only show up while computing (degenerate covariances, singular
// conditioning, enumeration blow-up) throw NumericalError.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IndependenceError : public std::invalid_argument {
 public:
  explicit IndependenceError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace zonoid
