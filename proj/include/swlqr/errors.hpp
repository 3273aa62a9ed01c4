#pragma once

#include <stdexcept>
#include <string>

namespace swlqr {

enum class ErrorCode {
    NonCausal,
    InvalidRate,
    InvalidWeight,
    InvalidHorizon,
    InvalidNoise,
    InvalidArgument,
    InvalidScenario,
    MissingTableEntry,
    NonConvergence,
    FixedPointDivergence,
    MassUnderflow,
    EmptyEvent,
    CalibrationFailure,
    ExplosionGuard,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Bad input: parameters, configs, tables. CLI exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A numerical procedure could not deliver its contract. CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace swlqr
