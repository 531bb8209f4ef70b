#pragma once

#include <stdexcept>
#include <string>

namespace fendi {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Fidelity at or below 1/4: no usable entanglement and no finite length.
class DegenerateFidelity : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// The requested expected-EDR bound exceeds what the network can deliver.
class EdrUnachievable : public Error {
 public:
  EdrUnachievable(const std::string& what, double max_edr)
      : Error(what), max_edr_(max_edr) {}
  double max_edr() const { return max_edr_; }

 private:
  double max_edr_;
};

namespace lp {
// Solver breakdown (iteration limit, singular pivots, post-solve violation).
// Never reported as infeasibility.
class NumericalError : public Error {
 public:
  using Error::Error;
};
}  // namespace lp

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class PlanError : public Error {
 public:
  using Error::Error;
};

}  // namespace fendi
