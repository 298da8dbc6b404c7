#pragma once

#include <stdexcept>
#include <string>

namespace r2l {

/// Inconsistent shapes, invalid hyperparameters, unknown config names.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// API misuse: out-of-range pixels, backward without forward, empty inputs.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or corrupted files (bad magic, version, checksum, truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training loop produced a non-finite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stored artifact does not belong to the model it is used with.
class DigestMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace r2l
