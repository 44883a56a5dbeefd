#pragma once

#include <stdexcept>
#include <string>

namespace interreflect {

// Error taxonomy mirrors the CLI exit codes: config 2, data 3, estimation 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid options, annotations, manifests or malformed sample CSVs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Unreadable or malformed dataset/image files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Degenerate geometry, saturated patches, solver failures.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace interreflect
