#include "swlqr/errors.hpp"

namespace swlqr {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonCausal: return "NonCausal";
        case ErrorCode::InvalidRate: return "InvalidRate";
        case ErrorCode::InvalidWeight: return "InvalidWeight";
        case ErrorCode::InvalidHorizon: return "InvalidHorizon";
        case ErrorCode::InvalidNoise: return "InvalidNoise";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::MissingTableEntry: return "MissingTableEntry";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::FixedPointDivergence: return "FixedPointDivergence";
        case ErrorCode::MassUnderflow: return "MassUnderflow";
        case ErrorCode::EmptyEvent: return "EmptyEvent";
        case ErrorCode::CalibrationFailure: return "CalibrationFailure";
        case ErrorCode::ExplosionGuard: return "ExplosionGuard";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace swlqr
