#pragma once

#include <stdexcept>
#include <string>

namespace snapfix {

/// Base class for all snapfix exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or out-of-domain input (bad date, negative elevation, ...).
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/// Malformed file content; message carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// No usable ephemeris record for the requested satellite/time.
class StaleEphemerisError : public Error {
 public:
  explicit StaleEphemerisError(const std::string& msg) : Error(msg) {}
};

/// Fewer observations than the requested solver needs.
class InsufficientObservationsError : public Error {
 public:
  explicit InsufficientObservationsError(const std::string& msg) : Error(msg) {}
};

/// Rank-deficient or otherwise unsolvable geometry.
class DegenerateProblemError : public Error {
 public:
  explicit DegenerateProblemError(const std::string& msg) : Error(msg) {}
};

/// Overflow, NaN, or a search that could not be started.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

}  // namespace snapfix
