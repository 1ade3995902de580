#ifndef RANKAD_ERROR_HPP
#define RANKAD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace rankad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (k too large, alpha out of range, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

/// Malformed input file. Carries the 1-based row and column when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
      : Error(row == 0 ? what
                       : what + " (row " + std::to_string(row) + ", column " +
                             std::to_string(col) + ")"),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

/// Model archive with an unsupported format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

/// Model archive that is truncated, corrupt or violates a stored invariant.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// The data admit no trainable ordering (single quantization level, all pairs dropped, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace rankad

#endif  // RANKAD_ERROR_HPP
