#pragma once

#include <stdexcept>
#include <string>

namespace celltrack {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance lost positive-definiteness, singular innovation, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Every hypothesis weight collapsed to zero; the density cannot be normalized.
class DegenerateDensityError : public Error {
 public:
  explicit DegenerateDensityError(const std::string& what, int frame = -1)
      : Error(what), frame_(frame) {}
  int frame() const noexcept { return frame_; }

 private:
  int frame_;
};

/// A joint block outgrew the configured state-dimension limit (exact filter).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: label strings, config files, detection lines.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace celltrack
