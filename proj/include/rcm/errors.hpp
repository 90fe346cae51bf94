#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scatter or covariance matrix failed the Cholesky pivot test.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A hypothesis index (l,h) outside 1 <= l <= N_p, 0 <= h <= N_p - l.
class IndexOffGrid : public Error {
 public:
  using Error::Error;
};

class NonPositiveResolution : public Error {
 public:
  using Error::Error;
};

class ZeroColumn : public Error {
 public:
  using Error::Error;
};

class MissingClairvoyantInputs : public Error {
 public:
  using Error::Error;
};

class InsufficientTrials : public Error {
 public:
  using Error::Error;
};

class NullHypothesisScenario : public Error {
 public:
  using Error::Error;
};

class MissingThreshold : public Error {
 public:
  using Error::Error;
};

/// Configuration parse or validation failure. The message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcm
