#include "quadpencil/errors.hpp"

namespace qp {

const char* error_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::ReducibleModulus: return "ReducibleModulus";
    case ErrorKind::NotASquare: return "NotASquare";
    case ErrorKind::ZeroForm: return "ZeroForm";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorKind::NonIntegralResult: return "NonIntegralResult";
    case ErrorKind::ShapeViolation: return "ShapeViolation";
    case ErrorKind::SquareDeterminant: return "SquareDeterminant";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ToleranceAmbiguous: return "ToleranceAmbiguous";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace qp
