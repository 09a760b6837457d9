#include "solitonforge/error.hpp"

namespace solitonforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::BadNormalization: return "BadNormalization";
    case Errc::NonNegativeGauge: return "NonNegativeGauge";
    case Errc::BadSeedSign: return "BadSeedSign";
    case Errc::InvalidControls: return "InvalidControls";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SeedLeavesWrongRegion: return "SeedLeavesWrongRegion";
    case Errc::NonPositiveY: return "NonPositiveY";
    case Errc::StepLimitExceeded: return "StepLimitExceeded";
    case Errc::InvariantViolated: return "InvariantViolated";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NonNegativeL: return "NonNegativeL";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::ZeroY: return "ZeroY";
    case Errc::ZeroG: return "ZeroG";
    case Errc::InsufficientTail: return "InsufficientTail";
    case Errc::BlowUp: return "BlowUp";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::IncompleteInputs: return "IncompleteInputs";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(std::string_view module, Errc code, const std::string& detail)
    : std::runtime_error(std::string(module) + "." + std::string(errc_name(code)) + ": " + detail),
      module_(module),
      code_(code),
      detail_(detail) {}

std::string Error::qualified_code() const { return module_ + "." + std::string(errc_name(code_)); }

}  // namespace solitonforge
