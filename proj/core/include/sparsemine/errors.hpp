#pragma once

#include <stdexcept>
#include <string>

namespace sparsemine {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad shape, out-of-range knob).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data cannot be processed (degenerate training set, mismatched bundles).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a meaningful result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent persisted file.
class FormatError : public DataError {
 public:
  enum class Kind {
    io,
    bad_magic,
    truncated,
    dimension_overflow,
    parse,
    ragged_rows,
    stale_bundle,
    kind_mismatch,
  };

  FormatError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sparsemine
