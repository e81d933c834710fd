#pragma once

#include <stdexcept>
#include <string>

namespace qp {

enum class ErrorKind {
  NotPrime,
  ReducibleModulus,
  NotASquare,
  ZeroForm,
  ContextMismatch,
  DimensionMismatch,
  SingularTransform,
  SearchExhausted,
  SingularPoint,
  PreconditionViolated,
  InsufficientPrecision,
  NonIntegralResult,
  ShapeViolation,
  SquareDeterminant,
  GenerationExhausted,
  HypothesisViolated,
  ToleranceAmbiguous,
  BudgetExceeded,
  InvalidInput,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

}  // namespace qp
