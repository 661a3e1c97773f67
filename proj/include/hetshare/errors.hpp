#pragma once

#include <stdexcept>
#include <string>

namespace hetshare {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An operation was called outside its mathematical domain
// (negative rate, non-positive price, utility target outside (0,1), ...).
struct DomainError : Error {
  using Error::Error;
};

// Structurally invalid input (bad scenario, bad allocation problem,
// unsupported oracle size, bad sweep range).
struct ValidationError : Error {
  using Error::Error;
};

// The dual search failed to converge or to bracket the shadow price.
struct SolverError : Error {
  using Error::Error;
};

// Scenario file could not be parsed; carries a 1-based line number.
struct ParseError : Error {
  ParseError(std::string source, int line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        source_name(std::move(source)),
        line_number(line) {}

  std::string source_name;
  int line_number;
};

}  // namespace hetshare
