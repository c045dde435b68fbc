#pragma once

#include <stdexcept>
#include <string>

namespace ehtx {

/// Argument outside the physical domain of a battery or rate curve.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input (scenario files, CLI arguments, specs).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An optimizer failed to converge or hit an empty feasible set.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ehtx
