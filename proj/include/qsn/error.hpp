#pragma once

#include <stdexcept>
#include <string>

namespace qsn {

// Base for every error the library raises. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from one of the groups below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (bad Pauli text, inconsistent lengths, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Mathematical failures: the problem has no admissible answer.
class MathError : public Error {
 public:
  using Error::Error;
};

class Infeasible : public MathError {
 public:
  using MathError::MathError;
};

class RankDeficient : public MathError {
 public:
  using MathError::MathError;
};

class DegenerateSolution : public MathError {
 public:
  using MathError::MathError;
};

class SignalOutOfRange : public MathError {
 public:
  using MathError::MathError;
};

class StepTooCoarse : public MathError {
 public:
  using MathError::MathError;
};

// Requested size exceeds a configured resource limit.
class SizeExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace qsn
