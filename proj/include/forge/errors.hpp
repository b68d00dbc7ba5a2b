#pragma once

#include <stdexcept>
#include <string>

namespace forge {

// Base of every error the engine raises on purpose. The CLI maps the
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable, malformed or unsupported input files.
class IngestError : public Error {
 public:
  using Error::Error;
};

class CleaningError : public Error {
 public:
  using Error::Error;
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for the given input (constant truth, one class, ...).
class MetricError : public Error {
 public:
  using Error::Error;
};

// Evaluation could not be carried out on the table (no usable features, too
// few rows, non-numeric regression target).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// A malformed action or plan object on the JSON wire.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Writing an output file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

// An internal invariant was broken. Never expected at runtime.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace forge
