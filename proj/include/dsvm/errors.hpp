#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dsvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Construction-time and input validation failures.
class InvalidEdge : public Error {
 public:
  using Error::Error;
};
class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidParam : public Error {
 public:
  using Error::Error;
};

// Run configuration and file IO.
class ConfigError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

// Dataset ingestion.
class ParseError : public Error {
 public:
  using Error::Error;
};
class LabelError : public Error {
 public:
  using Error::Error;
};
class DimMismatch : public Error {
 public:
  using Error::Error;
};
class TooFewSamples : public Error {
 public:
  using Error::Error;
};

// Flow evaluation and integration.
class NegativeState : public Error {
 public:
  using Error::Error;
};
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, std::int64_t step)
      : Error(what), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

// Oracle.
class OracleScaleExceeded : public Error {
 public:
  using Error::Error;
};
class InternalError : public Error {
 public:
  using Error::Error;
};
class EmbedFailure : public Error {
 public:
  using Error::Error;
};

// Certificates.
class MissingSnapshots : public Error {
 public:
  using Error::Error;
};

}  // namespace dsvm
