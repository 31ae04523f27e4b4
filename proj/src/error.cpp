#include "varbounds/error.hpp"

namespace varbounds {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::UnsupportedChain: return "UnsupportedChain";
        case ErrorCode::C1Violation: return "C1Violation";
        case ErrorCode::ForwardViolation: return "ForwardViolation";
        case ErrorCode::DegeneratePolicy: return "DegeneratePolicy";
        case ErrorCode::ReconstructionFailure: return "ReconstructionFailure";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::NonMonotone: return "NonMonotone";
        case ErrorCode::Numerical: return "Numerical";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace varbounds
