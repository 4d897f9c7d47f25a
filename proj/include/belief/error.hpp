#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace belief {

/// Input data could not be read or is inconsistent with its declared shape.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// An internal structure violated its invariants (for example a locator that
/// points outside its partition).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace belief
