#pragma once

#include <stdexcept>
#include <string>

namespace ednet {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct UnknownFeature : Error {
  using Error::Error;
};
struct UnknownNode : Error {
  using Error::Error;
};
struct IndexMismatch : Error {
  using Error::Error;
};
struct InvalidScenario : Error {
  using Error::Error;
};
struct UnsupportedKind : Error {
  using Error::Error;
};
struct FileParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct InvalidRate : Error {
  using Error::Error;
};
struct InvalidParams : Error {
  using Error::Error;
};
struct InstanceTooLarge : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct IterationLimit : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace ednet
