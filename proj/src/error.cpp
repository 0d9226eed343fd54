#include "symq/error.hpp"

namespace symq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateNormalization: return "DegenerateNormalization";
    case ErrorCode::VerificationFailure: return "VerificationFailure";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::InvalidNetlist: return "InvalidNetlist";
    case ErrorCode::UnsupportedElement: return "UnsupportedElement";
    case ErrorCode::SingularZ: return "SingularZ";
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::CompactVariableRefused: return "CompactVariableRefused";
    case ErrorCode::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace symq
