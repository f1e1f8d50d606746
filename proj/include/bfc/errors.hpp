#pragma once

#include <stdexcept>
#include <string>

namespace bfc {

// Machine-readable reason codes; the CLI maps these onto exit codes.
enum class ErrorCode {
  ZeroVector,
  CoincidentAgents,
  MissingBearing,
  SingularFollowerBlock,
  SingularKi,
  TimeOutOfDomain,
  NonUniqueTarget,
  BadGainBound,
  GammaTooLarge,
  UnsupportedLaw,
  NumericalBlowup,
  ValidationError,
  SchemaError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::ZeroVector: return "ZERO_VECTOR";
    case ErrorCode::CoincidentAgents: return "COINCIDENT_AGENTS";
    case ErrorCode::MissingBearing: return "MISSING_BEARING";
    case ErrorCode::SingularFollowerBlock: return "SINGULAR_FOLLOWER_BLOCK";
    case ErrorCode::SingularKi: return "SINGULAR_KI";
    case ErrorCode::TimeOutOfDomain: return "TIME_OUT_OF_DOMAIN";
    case ErrorCode::NonUniqueTarget: return "NON_UNIQUE_TARGET";
    case ErrorCode::BadGainBound: return "BAD_GAIN_BOUND";
    case ErrorCode::GammaTooLarge: return "GAMMA_TOO_LARGE";
    case ErrorCode::UnsupportedLaw: return "UNSUPPORTED_LAW";
    case ErrorCode::NumericalBlowup: return "NUMERICAL_BLOWUP";
    case ErrorCode::ValidationError: return "VALIDATION_ERROR";
    case ErrorCode::SchemaError: return "SCHEMA_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bfc
