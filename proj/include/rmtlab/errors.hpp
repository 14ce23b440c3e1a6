#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmtlab {

enum class ErrorKind {
  NotOneCut,
  BadNormalization,
  DomainError,
  CrossCheckFailure,
  EigensolveFailure,
  ChainDiverged,
  DiagonalError,
  NormalizationUnavailable,
  InsufficientReplicas,
  PrecisionExhausted,
  EdgeTooClose,
  ShootingFailed,
  BranchAmbiguity,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type; what() is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotOneCut: return "NotOneCut";
    case ErrorKind::BadNormalization: return "BadNormalization";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::CrossCheckFailure: return "CrossCheckFailure";
    case ErrorKind::EigensolveFailure: return "EigensolveFailure";
    case ErrorKind::ChainDiverged: return "ChainDiverged";
    case ErrorKind::DiagonalError: return "DiagonalError";
    case ErrorKind::NormalizationUnavailable: return "NormalizationUnavailable";
    case ErrorKind::InsufficientReplicas: return "InsufficientReplicas";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::EdgeTooClose: return "EdgeTooClose";
    case ErrorKind::ShootingFailed: return "ShootingFailed";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace rmtlab
