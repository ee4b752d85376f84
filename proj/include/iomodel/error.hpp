#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iomodel {

enum class ErrorKind {
    InvalidArgument,
    NotProductive,
    DegenerateGenerators,
    NotInterior,
    Decomposable,
    DecomposableMinor,
    NoConvergence,
    NotInCone,
    HypothesisViolated,
    DegenerateQuadraticForm,
    ZeroImage,
    ZeroColumn,
    SolverStall,
    ZeroValue,
    ZeroDenominator,
    SingularUnresolved,
    BalanceInconsistent,
    ColumnSumViolation,
    ZeroBase,
    ZeroValueAdded,
    BalanceViolation,
    ParseError,
    BalanceError,
};

std::string_view to_string(ErrorKind kind);

/// Input errors are problems with the caller's data; everything else is numerical.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace iomodel
