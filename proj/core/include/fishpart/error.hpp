#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fishpart {

enum class ErrorCode {
    InvalidArgument,
    NoForeground,
    EmptyMask,
    DegenerateShape,
    FragmentedMask,
    NoTailNotch,
    GeometryError,
    NoOverlap,
    PlacementInfeasible,
    EmptyRing,
    Overflow,
    Io,
    Parse,
    NoGroundTruth,
    NoClasses,
    TooFewIdentities,
    OutOfFrame,
    EmptyInput,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fishpart
