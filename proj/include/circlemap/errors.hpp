#ifndef CIRCLEMAP_ERRORS_HPP
#define CIRCLEMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace circlemap {

enum class ErrorCode {
    NonConvergence,
    NotADiffeo,
    ResolutionTooCoarse,
    PrecisionLoss,
    BasePointMismatch,
    NotInvertible,
    ChainMismatch,
    NotParabolic,
    EvenLeadingOrder,
    InsufficientOrder,
    DegreeTooHigh,
    HypothesisViolated,
    TargetsTooFar,
    ConstructionFailed,
    HorizonNotFound,
    QuadratureFailure,
    NoEntry,
    PointOnBoundary,
    NotConverged,
    BadInput,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NotADiffeo: return "NotADiffeo";
        case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorCode::PrecisionLoss: return "PrecisionLoss";
        case ErrorCode::BasePointMismatch: return "BasePointMismatch";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::ChainMismatch: return "ChainMismatch";
        case ErrorCode::NotParabolic: return "NotParabolic";
        case ErrorCode::EvenLeadingOrder: return "EvenLeadingOrder";
        case ErrorCode::InsufficientOrder: return "InsufficientOrder";
        case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::TargetsTooFar: return "TargetsTooFar";
        case ErrorCode::ConstructionFailed: return "ConstructionFailed";
        case ErrorCode::HorizonNotFound: return "HorizonNotFound";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::NoEntry: return "NoEntry";
        case ErrorCode::PointOnBoundary: return "PointOnBoundary";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, std::string(error_code_name(code)) + ": " + msg);
}

} // namespace circlemap

#endif
