#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symq {

enum class ErrorCode {
    InvalidArgument,
    NotSquare,
    OddDimension,
    NotSymmetric,
    NotPSD,
    NotPositiveDefinite,
    Inconsistent,
    ConvergenceFailure,
    DegenerateNormalization,
    VerificationFailure,
    SyntaxError,
    UnknownReference,
    DuplicateName,
    InvalidNetlist,
    UnsupportedElement,
    SingularZ,
    Precondition,
    CompactVariableRefused,
    MismatchBeyondTolerance,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse-time error with a source location (1-based).
class SourceError : public Error {
public:
    SourceError(ErrorCode code, int line, int col, const std::string& message)
        : Error(code, std::to_string(line) + ":" + std::to_string(col) + ": " + message),
          line_(line), col_(col), detail_(message) {}

    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    int line_;
    int col_;
    std::string detail_;
};

class VerificationFailure : public Error {
public:
    VerificationFailure(const std::string& identity, double residual, double bound)
        : Error(ErrorCode::VerificationFailure,
                identity + " residual " + std::to_string(residual) + " exceeds " +
                    std::to_string(bound)),
          identity_(identity), residual_(residual), bound_(bound) {}

    const std::string& identity() const noexcept { return identity_; }
    double residual() const noexcept { return residual_; }
    double bound() const noexcept { return bound_; }

private:
    std::string identity_;
    double residual_;
    double bound_;
};

} // namespace symq
