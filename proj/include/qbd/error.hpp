#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbd {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonHermitian,
    NonClosedBasis,
    ConvergenceFailure,
    NearDegeneracy,
    AmbiguousTracking,
    ZeroField,
    NoSolution,
    InitialConditionViolated,
    ZeroVariance,
    PreconditionViolated,
    NoSuchEigenvalue,
    DegenerateEigenvalue,
    DegenerateSegment,
    EmptyInput,
    Validation,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace qbd
