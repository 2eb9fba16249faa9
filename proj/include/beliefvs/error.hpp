#pragma once

#include <stdexcept>
#include <string>

namespace beliefvs {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model/policy/scheme input (exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

// A combinatorial or resource guard tripped (exit code 3).
class GuardError : public Error {
 public:
  using Error::Error;
};

// The LP solver or another numerical routine failed (exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Bayes update with an observation whose probability is below 1e-12.
class ZeroProbabilityObservation : public Error {
 public:
  using Error::Error;
};

}  // namespace beliefvs
