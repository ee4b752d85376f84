#include "iomodel/error.hpp"

namespace iomodel {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotProductive: return "NotProductive";
    case ErrorKind::DegenerateGenerators: return "DegenerateGenerators";
    case ErrorKind::NotInterior: return "NotInterior";
    case ErrorKind::Decomposable: return "Decomposable";
    case ErrorKind::DecomposableMinor: return "DecomposableMinor";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotInCone: return "NotInCone";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::DegenerateQuadraticForm: return "DegenerateQuadraticForm";
    case ErrorKind::ZeroImage: return "ZeroImage";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::SolverStall: return "SolverStall";
    case ErrorKind::ZeroValue: return "ZeroValue";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::SingularUnresolved: return "SingularUnresolved";
    case ErrorKind::BalanceInconsistent: return "BalanceInconsistent";
    case ErrorKind::ColumnSumViolation: return "ColumnSumViolation";
    case ErrorKind::ZeroBase: return "ZeroBase";
    case ErrorKind::ZeroValueAdded: return "ZeroValueAdded";
    case ErrorKind::BalanceViolation: return "BalanceViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::BalanceError: return "BalanceError";
    }
    return "Unknown";
}

bool is_input_error(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::BalanceError:
    case ErrorKind::BalanceInconsistent:
    case ErrorKind::BalanceViolation:
    case ErrorKind::ColumnSumViolation:
    case ErrorKind::ZeroValueAdded:
    case ErrorKind::ZeroColumn:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace iomodel
