#pragma once

#include <stdexcept>
#include <string>

namespace vidmem {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map families of failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or sizes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller-supplied parameter outside its allowed set or range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An input outside the mathematical domain of the operation (empty pool,
// empty time axis, zero positives).
class DomainError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf encountered where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Calling an operation in a state its contract forbids.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input text (JSON, config lines).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input whose structure disagrees with the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A scalar field outside its documented bounds.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Inconsistent model or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A statistic is undefined for the supplied data (e.g. rank correlation of a
// constant vector).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Every candidate was rejected as degenerate.
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace vidmem
