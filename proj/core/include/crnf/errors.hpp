#pragma once

#include <stdexcept>
#include <string>

namespace crnf {

enum class ErrorCode {
    VariableMismatch,
    ConstantTermSubstitution,
    NotUnitConstant,
    NotInvertible,
    NoConvergence,
    RealityViolation,
    NormalizationViolation,
    NormalityViolation,
    Inconsistent,
    NotSolvable,
    TruncationTooSmall,
    NonRationalScaling,
    InsufficientTruncation,
    SingularStep,
    HypothesesNotMet,
    Inconclusive,
    FormulaMismatch,
    ArithmeticError,
    SyntaxError,
    UnknownVariable,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::VariableMismatch: return "VariableMismatch";
        case ErrorCode::ConstantTermSubstitution: return "ConstantTermSubstitution";
        case ErrorCode::NotUnitConstant: return "NotUnitConstant";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RealityViolation: return "RealityViolation";
        case ErrorCode::NormalizationViolation: return "NormalizationViolation";
        case ErrorCode::NormalityViolation: return "NormalityViolation";
        case ErrorCode::Inconsistent: return "Inconsistent";
        case ErrorCode::NotSolvable: return "NotSolvable";
        case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorCode::NonRationalScaling: return "NonRationalScaling";
        case ErrorCode::InsufficientTruncation: return "InsufficientTruncation";
        case ErrorCode::SingularStep: return "SingularStep";
        case ErrorCode::HypothesesNotMet: return "HypothesesNotMet";
        case ErrorCode::Inconclusive: return "Inconclusive";
        case ErrorCode::FormulaMismatch: return "FormulaMismatch";
        case ErrorCode::ArithmeticError: return "ArithmeticError";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class ToolkitError : public std::runtime_error {
public:
    ToolkitError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw ToolkitError(code, what);
}

}  // namespace crnf
