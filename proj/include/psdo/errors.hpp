#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psdo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operands of different dimension n.
struct DimensionError : Error {
  using Error::Error;
};

// A requested coefficient lies outside the region where the truncated value is
// known, or no finite output window can be derived.
struct WindowError : Error {
  using Error::Error;
};

// Argument outside the domain of an operation (negative binomial lower index,
// non-unital inverse, unsupported shift index, pole, ...).
struct DomainError : Error {
  using Error::Error;
};

// Evolutionary derivation hit a (symbol, direction) pair without a rule.
struct MissingRuleError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

}  // namespace psdo
