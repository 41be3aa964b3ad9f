#pragma once

#include <stdexcept>
#include <string>

namespace gaugeforge {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value failed the defining relations of its type (group membership,
// algebra membership, compatibility of local data, ...).
class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A group element (or local datum) lies outside the domain of the
// logarithmic chart.
class OutOfChart : public Error {
 public:
  using Error::Error;
};

class GroupMismatch : public Error {
 public:
  using Error::Error;
};

// Invalid cover parameters or a point outside every arc of a cover.
class CoverError : public Error {
 public:
  using Error::Error;
};

// Evaluation of sampled data outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Transition data violating the cocycle condition.
class CocycleError : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

// A diffeomorphism (or one of its derived fields) left the admissible
// neighbourhood of the identity.
class NeighbourhoodError : public Error {
 public:
  using Error::Error;
};

class NewtonFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gaugeforge
