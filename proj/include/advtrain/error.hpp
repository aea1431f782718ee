#pragma once

#include <stdexcept>
#include <string>

namespace advtrain {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor shapes do not compose (matmul inner dims, elementwise mismatch, ...).
struct DimensionError : Error {
  using Error::Error;
};

// A documented precondition was violated (label out of range, empty dataset,
// backward on a non-scalar root, ...).
struct ContractError : Error {
  using Error::Error;
};

// Misuse of a single-shot resource, e.g. running backward twice on one tape.
struct UsageError : Error {
  using Error::Error;
};

// A serialized artifact (IDX file, checkpoint, metrics file) is malformed.
struct FormatError : Error {
  using Error::Error;
};

// An experiment configuration failed validation.
struct ConfigError : Error {
  using Error::Error;
};

// The model architecture does not support the requested operation.
struct ArchitectureError : Error {
  using Error::Error;
};

}  // namespace advtrain
