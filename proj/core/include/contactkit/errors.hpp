#pragma once

#include <stdexcept>
#include <string>

namespace contactkit {

// Base for every error raised by the library. Callers that only care about
// "something in contactkit failed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or unresolvable configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Calibration pose set cannot determine the payload parameters.
class IdentificationError : public Error {
 public:
  using Error::Error;
};

// On-disk episode / sample files that do not match their documented schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite state detected while stepping a simulation.
class SimulationFault : public Error {
 public:
  using Error::Error;
};

}  // namespace contactkit
