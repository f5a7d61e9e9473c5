#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rboss {

// Base of every error the library throws. Each subclass maps onto one
// status code of the C API (see rboss.h).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  explicit FormatError(const std::string& what) : Error(what), row_(0) {}

  // 1-based line number of the offending row, 0 when not row specific.
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class StratificationError : public Error {
 public:
  using Error::Error;
};

class PolicyError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class EstimateError : public Error {
 public:
  using Error::Error;
};

class BuildError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class VersionError : public CheckpointError {
 public:
  VersionError(unsigned found, unsigned supported)
      : CheckpointError("unsupported checkpoint format version " +
                        std::to_string(found) + " (this build reads version " +
                        std::to_string(supported) + ")"),
        found_(found),
        supported_(supported) {}

  unsigned found() const noexcept { return found_; }
  unsigned supported() const noexcept { return supported_; }

 private:
  unsigned found_;
  unsigned supported_;
};

class DatasetMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace rboss
