#pragma once

#include <stdexcept>

namespace qsi {

// Base class for library failures so callers can separate them from std errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

// A heralded-source configuration that can never produce a herald click.
struct HeraldingImpossibleError : Error {
  using Error::Error;
};

// Root bracketing failed: no sign change over the interval.
struct BracketError : Error {
  using Error::Error;
};

struct DegenerateIntensitiesError : Error {
  using Error::Error;
};

struct NoSignalError : Error {
  using Error::Error;
};

struct InsufficientDataError : Error {
  using Error::Error;
};

struct InfeasibleError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace qsi
