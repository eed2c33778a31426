#pragma once

#include <stdexcept>
#include <string>

namespace ptc {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function or a malformed parameter set.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation overflowed (e.g. a time-warp queried too close to its horizon).
class NonFinite : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Mass matrix failed the Cholesky factorization.
class SingularMass : public Error {
 public:
  using Error::Error;
};

/// A gain matrix that must be negative definite is not.
class GainSignError : public Error {
 public:
  using Error::Error;
};

class NotHurwitz : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class BoundViolated : public Error {
 public:
  BoundViolated(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class SimulationDiverged : public Error {
 public:
  using Error::Error;
};

class NoCandidatePassed : public Error {
 public:
  using Error::Error;
};

}  // namespace ptc
