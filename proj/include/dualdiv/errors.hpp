#pragma once

#include <stdexcept>
#include <string>

namespace dualdiv {

enum class Errc {
    NonPositiveParameter,
    InsufficientDrift,
    PreconditionViolated,
    DegenerateThreshold,
    DegenerateBarrier,
    DivergentIntegral,
    ExponentAtOrAboveBeta,
    InvalidInput,
};

/// Stable name of an error code, as printed by the command-line tool.
const char* errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

}  // namespace dualdiv
