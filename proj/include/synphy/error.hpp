#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synphy {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised while parsing text input. Carries the 1-based line (or
/// character position for single-line formats) at which parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t where)
      : Error(msg), where_(where) {}

  std::size_t where() const { return where_; }

 private:
  std::size_t where_;
};

}  // namespace synphy
