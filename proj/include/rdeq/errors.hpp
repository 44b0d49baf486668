#pragma once

#include <stdexcept>
#include <string>

namespace rdeq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration / scenario file problems (missing keys, bad values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Sampling could not satisfy its contract (e.g. support floor redraw budget).
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// A residual system produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// No usable probability mass (all-zero posterior, empty histogram).
class DegeneratePosteriorError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an interface contract (mismatched grids, unnormalized input).
class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdeq
