#pragma once

#include <stdexcept>
#include <string>

namespace spde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: non power-of-two sizes, epsilon out of range, unknown preset.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested resolution exceeds the resolution of the field it is derived from.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Model data violates positivity of the spectrum or of the noise weights.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent arguments between cooperating calls (dimension or scheme mismatch).
class UsageError : public Error {
 public:
  using Error::Error;
};

class StatisticsError : public Error {
 public:
  using Error::Error;
};

/// A command needs an artifact (e.g. a cached pseudo-reference) that does not exist yet.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spde
