#pragma once

#include <stdexcept>
#include <string>

namespace trajsyn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A consecutive-cell pair in input data violates the reachability constraint.
struct NonAdjacentMove : Error {
  using Error::Error;
};

struct IndexOutOfDomain : Error {
  using Error::Error;
};

struct StateNotInDomain : Error {
  using Error::Error;
};

struct MixedLengths : Error {
  using Error::Error;
};

struct UnusableEstimate : Error {
  using Error::Error;
};

struct NonAdjacentQuery : Error {
  using Error::Error;
};

// Internal ledger assertion; reaching it means a budget accounting bug.
struct WindowOverflow : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_number(line) {}
  std::size_t line_number;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct StreamTooShort : Error {
  using Error::Error;
};

}  // namespace trajsyn
