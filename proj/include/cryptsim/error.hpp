#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptsim {

enum class ErrorCode {
    InvalidParameter,
    InvalidState,
    CapExceeded,
    ResourceLimit,
    IncompleteAttractorSet,
    NonTreeStructure,
    InternalConsistency,
    InvalidProposal,
    TooSmallToDivide,
    MissingCell,
    IncompatibleLineage,
    Inconsistency,
    EmptyPopulation,
    InsufficientData,
    UndefinedStatistic,
    Config,
    NoCompatibleNetwork,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (tests, the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cryptsim
