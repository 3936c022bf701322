#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdl {

enum class ErrorCode {
  RangeViolation,
  EmptyMass,
  BoundViolation,
  NonpositiveData,
  InvalidCorridor,
  DeltaOutOfRange,
  ScheduleDiverged,
  NewtonDiverged,
  NonFiniteState,
  StabilityViolation,
  MassCollapse,
  GridMismatch,
  XiNonpositive,
  InvalidArgument,
  ConfigParse,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `field()` is set for
/// RangeViolation (the offending parameter) and config errors (the key).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace sdl
