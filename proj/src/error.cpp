#include "semidot/error.hpp"

namespace semidot {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMagic: return "UnsupportedMagic";
    case ErrorCode::ZeroMassImage: return "ZeroMassImage";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::EmptyBisector: return "EmptyBisector";
    case ErrorCode::EndpointOffCurve: return "EndpointOffCurve";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace semidot
