// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <stdexcept>
#include <string>

namespace dfn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values (window length, band count, ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between an operand and what a layer or op expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data (weight containers).
class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfn
