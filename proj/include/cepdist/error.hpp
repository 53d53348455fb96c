#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cepdist {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    LengthMismatch,
    EmptySignal,
    NonFinite,
    NotInvertible,
    UnitCircleRoot,
    NonSimpleRoot,
    ConjugateMismatch,
    LogOfNonpositive,
    SpectralNull,
    KindMismatch,
    ZeroNorm,
    NotMinimumPhaseStable,
    WrongPhaseType,
    MixedPhaseUnsupported,
    RankDeficient,
    InsufficientData,
    NotConverged,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptySignal: return "EmptySignal";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::UnitCircleRoot: return "UnitCircleRoot";
        case ErrorCode::NonSimpleRoot: return "NonSimpleRoot";
        case ErrorCode::ConjugateMismatch: return "ConjugateMismatch";
        case ErrorCode::LogOfNonpositive: return "LogOfNonpositive";
        case ErrorCode::SpectralNull: return "SpectralNull";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::ZeroNorm: return "ZeroNorm";
        case ErrorCode::NotMinimumPhaseStable: return "NotMinimumPhaseStable";
        case ErrorCode::WrongPhaseType: return "WrongPhaseType";
        case ErrorCode::MixedPhaseUnsupported: return "MixedPhaseUnsupported";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const char* what) {
    if (!condition) fail(code, what);
}

} // namespace detail
} // namespace cepdist
