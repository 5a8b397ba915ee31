#pragma once

#include <stdexcept>
#include <string>

namespace bivmap {

// Every error the library reports about its inputs derives from Error.
// Anything else escaping the library is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document or CSV; message carries the location (row, region id,
// ring index) where it is known.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant or an operation's
// precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace bivmap
