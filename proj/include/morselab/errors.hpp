#pragma once

#include <stdexcept>
#include <string>

namespace morselab {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain input: wrong chart for a space, degenerate
// configuration, empty window.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A hypothesis of a construction fails: tuple not in the requested stratum,
// map not 2-stable on the working window, empty preimage.
class StratumFailure : public Error {
 public:
  using Error::Error;
};

// An internal invariant was observed to fail. Always a bug or a constant
// table that is too small for the configuration at hand.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace morselab
