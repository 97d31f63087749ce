#pragma once

#include <stdexcept>
#include <string>

namespace radpml {

// Bad arguments or violated preconditions.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not reach its tolerance.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The requested witness does not exist for this input.
struct NoWitness : std::domain_error {
  using std::domain_error::domain_error;
};

// Argument on the branch cut of a principal function.
struct BranchCut : std::domain_error {
  using std::domain_error::domain_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace radpml
