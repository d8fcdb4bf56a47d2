#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: negative shifts, malformed vectors, invalid level sets, broken
// configs. Maps to CLI exit code 1.
struct ArgumentError : Error {
  using Error::Error;
};

// A computation would materialize more elements than the cardinality budget
// allows. Callers either raise the budget or accept an interval verdict.
struct BudgetError : Error {
  using Error::Error;
};

// A finite stage list was asked for a stage it does not define.
struct SpecError : Error {
  using Error::Error;
};

// A quantity that is guaranteed by an invariant came out wrong (for example a
// witness search falling below its proven floor). Never swallowed.
struct AnomalyError : Error {
  using Error::Error;
};

}  // namespace rankone
