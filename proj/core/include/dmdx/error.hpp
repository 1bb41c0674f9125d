#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmdx {

enum class ErrorCode {
    ZeroMatrix,
    NonFinite,
    NoConvergence,
    RankDeficient,
    BadLength,
    ShapeError,
    TooFewStates,
    DegenerateData,
    Overflow,
    RangeError,
    CflViolation,
    StateOutOfRange,
    NormDrift,
    SingularInterpolation,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define DMDX_REQUIRE(cond, code, msg)                 \
    do {                                              \
        if (!(cond)) throw ::dmdx::Error((code), (msg)); \
    } while (0)

}  // namespace dmdx
