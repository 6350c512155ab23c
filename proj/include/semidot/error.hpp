#pragma once

#include <stdexcept>
#include <string>

namespace semidot {

enum class ErrorCode {
    MalformedHeader,
    TruncatedData,
    UnsupportedMagic,
    ZeroMassImage,
    DimensionMismatch,
    InvalidArgument,
    Unbalanced,
    EmptyBisector,
    EndpointOffCurve,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
        , detail_(what)
    {}

    ErrorCode code() const noexcept { return code_; }
    /// Message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

} // namespace semidot
