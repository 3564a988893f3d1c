#pragma once

#include <stdexcept>
#include <string>

namespace dahar {

/// Operand shapes do not satisfy an operation's contract.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for malformed clip or model files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadMagicError : public FormatError {
 public:
  using FormatError::FormatError;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Length or field consistency check failed (e.g. trailing bytes).
class CorruptError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// The file ended before the header-declared payload was complete.
class TruncatedError : public CorruptError {
 public:
  using CorruptError::CorruptError;
};

/// Dataset-level contract violations: short clips, unknown labels, bad manifests.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dahar
