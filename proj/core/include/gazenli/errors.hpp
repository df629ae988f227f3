#pragma once

#include <stdexcept>
#include <string>

namespace gazenli {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input text (bad cell, wrong column count, non-numeric field).
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid input that violates a data invariant
/// (duplicate keys, index gaps, referential breaks, out-of-range values).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on a dataset whose regime does not support it.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Normalization term is undefined (empty scope) or zero.
class NormalizerError : public Error {
 public:
  using Error::Error;
};

/// A feature-set construction produced no features / no surviving dimensions.
class EmptyFeatureError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between model parameters and inputs.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, zero vectors, or a diverging optimization.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (bad fold count, unknown label, degenerate scenario).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure, with the offending path in the message.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gazenli
