#pragma once

#include <stdexcept>
#include <string>

namespace greente {

// Base class for all domain errors raised by this library. CLI maps these to
// exit code 1; anything else is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unknown ids, broken invariants, unparsable files.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A request that cannot be satisfied (no feasible split under the given mask,
// no feasible mask at all). `entity()` names the binding pair/link when known.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what, std::string entity = {})
      : Error(what), entity_(std::move(entity)) {}
  const std::string& entity() const { return entity_; }

 private:
  std::string entity_;
};

// Instance exceeds an exact solver's configured size limit.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

// Baseline energy is zero; saved-energy percentage is undefined.
class DegenerateInstanceError : public Error {
 public:
  using Error::Error;
};

// LP numerical breakdown (pivot below threshold); carries diagnostics text.
class SolverFailureError : public Error {
 public:
  using Error::Error;
};

// A simulation trace references entities the instance does not have.
class CorruptTraceError : public Error {
 public:
  using Error::Error;
};

// Topology generation could not produce a connected graph in bounded retries.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace greente
