#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace solitonforge {

/// Error codes shared by every module. The owning module is carried
/// separately so a failure can be reported as e.g. `model.DimensionTooSmall`.
enum class Errc {
  DimensionTooSmall,
  BadNormalization,
  NonNegativeGauge,
  BadSeedSign,
  InvalidControls,
  LengthMismatch,
  SeedLeavesWrongRegion,
  NonPositiveY,
  StepLimitExceeded,
  InvariantViolated,
  OutOfRange,
  NonNegativeL,
  QuadratureFailure,
  ZeroY,
  ZeroG,
  InsufficientTail,
  BlowUp,
  NoOverlap,
  IncompleteInputs,
  TooFewSamples,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(std::string_view module, Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& detail() const noexcept { return detail_; }
  std::string qualified_code() const;

 private:
  std::string module_;
  Errc code_;
  std::string detail_;
};

}  // namespace solitonforge
