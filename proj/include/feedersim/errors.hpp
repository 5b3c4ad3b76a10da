#pragma once

#include <stdexcept>
#include <string>

namespace feedersim {

enum class ErrorCode {
  parse_error,
  cycle_detected,
  dangling_reference,
  phase_mismatch,
  non_positive_rating,
  invalid_impedance,
  invalid_curve,
  invalid_device_config,
  singular_segment,
  unconverged_solution,
  zero_power_factor,
  duration_mismatch,
  undefined_baseline,
  empty_list,
  empty_sweep,
  missing_fundamental,
  unknown_order,
  missing_baseline,
  missing_file,
  io_error,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::cycle_detected: return "CycleDetected";
    case ErrorCode::dangling_reference: return "DanglingReference";
    case ErrorCode::phase_mismatch: return "PhaseMismatch";
    case ErrorCode::non_positive_rating: return "NonPositiveRating";
    case ErrorCode::invalid_impedance: return "InvalidImpedance";
    case ErrorCode::invalid_curve: return "InvalidCurve";
    case ErrorCode::invalid_device_config: return "InvalidDeviceConfig";
    case ErrorCode::singular_segment: return "SingularSegment";
    case ErrorCode::unconverged_solution: return "UnconvergedSolution";
    case ErrorCode::zero_power_factor: return "ZeroPowerFactor";
    case ErrorCode::duration_mismatch: return "DurationMismatch";
    case ErrorCode::undefined_baseline: return "UndefinedBaseline";
    case ErrorCode::empty_list: return "EmptyList";
    case ErrorCode::empty_sweep: return "EmptySweep";
    case ErrorCode::missing_fundamental: return "MissingFundamental";
    case ErrorCode::unknown_order: return "UnknownOrder";
    case ErrorCode::missing_baseline: return "MissingBaseline";
    case ErrorCode::missing_file: return "MissingFile";
    case ErrorCode::io_error: return "IoError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace feedersim
