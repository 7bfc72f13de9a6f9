#include "dualdiv/errors.hpp"

namespace dualdiv {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NonPositiveParameter: return "NonPositiveParameter";
        case Errc::InsufficientDrift: return "InsufficientDrift";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::DegenerateThreshold: return "DegenerateThreshold";
        case Errc::DegenerateBarrier: return "DegenerateBarrier";
        case Errc::DivergentIntegral: return "DivergentIntegral";
        case Errc::ExponentAtOrAboveBeta: return "ExponentAtOrAboveBeta";
        case Errc::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

}  // namespace dualdiv
