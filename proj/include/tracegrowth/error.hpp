#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracegrowth {

enum class ErrorCode {
    Domain,
    DegenerateChart,
    SingularRadialField,
    ProfileDomain,
    NotPositiveSemidefinite,
    Unsupported,
    DegenerateDistribution,
    InsufficientResolution,
    MeshDisconnected,
    HypothesisViolated,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can report it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Domain: return "DomainError";
        case ErrorCode::DegenerateChart: return "DegenerateChart";
        case ErrorCode::SingularRadialField: return "SingularRadialField";
        case ErrorCode::ProfileDomain: return "ProfileDomain";
        case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
        case ErrorCode::InsufficientResolution: return "InsufficientResolution";
        case ErrorCode::MeshDisconnected: return "MeshDisconnected";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "IoError";
    }
    return "Error";
}

} // namespace tracegrowth
