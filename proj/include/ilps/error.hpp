#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ilps {

enum class ErrorCode {
  EmptyEnsemble,
  BadIndex,
  BadDimension,
  TooFewParticles,
  NumericalFailure,
  NonFinite,
  InsufficientData,
  DataError,
  ConfigError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::TooFewParticles: return "TooFewParticles";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DataError: return "DataError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a simulated coordinate becomes NaN or Inf.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::uint64_t step, const std::string& what)
      : Error(ErrorCode::NonFinite, what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace ilps
