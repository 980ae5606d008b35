#pragma once

#include <stdexcept>
#include <string>

namespace qclift {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request exceeds a configured enumeration budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or value.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant that a theorem guarantees was found violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace qclift
