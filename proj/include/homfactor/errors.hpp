#pragma once

#include <stdexcept>
#include <string>

namespace homfactor {

// Base class for all toolkit errors; catch this to isolate a failing operation.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A search or materialization exceeded its node/row budget before finishing.
struct BudgetExceeded : Error {
  using Error::Error;
};

// An assignment was expected to be total but left variables unassigned.
struct PartialAssignment : Error {
  using Error::Error;
};

// Operations that assume a connected query structure reject disconnected input.
struct DisconnectedQuery : Error {
  using Error::Error;
};

// Instance exceeds a hard size cap (vertex count, variable count, ...).
struct TooLarge : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

struct NotDeterministic : Error {
  using Error::Error;
};

struct MissingDomain : Error {
  using Error::Error;
};

// Weight function violates a precondition (e.g. a single element carries more
// than two thirds of the total weight).
struct WeightViolation : Error {
  using Error::Error;
};

struct BadScope : Error {
  using Error::Error;
};

struct BadPartition : Error {
  using Error::Error;
};

struct RetriesExhausted : Error {
  using Error::Error;
};

struct NotCoordinateRespecting : Error {
  using Error::Error;
};

struct NotReduced : Error {
  using Error::Error;
};

struct NotOrderRespecting : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed input file (JSON shape, circuit line syntax, ...).
struct FileParseError : IoError {
  using IoError::IoError;
};

// Two structures that must share a signature do not.
struct SignatureMismatch : Error {
  using Error::Error;
};

}  // namespace homfactor
