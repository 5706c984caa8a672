#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pnest {

enum class ErrorKind {
  // configuration / usage
  InvalidConfig,
  NonIntegerCellCount,
  IndexOutOfFrame,
  ShapeMismatch,
  BitCountMismatch,
  LengthMismatch,
  EmptyInput,
  InvalidGeometry,
  SearchSpaceTooLarge,
  IoError,
  // numerical
  RankDeficientWeights,
  SingularK,
  ZeroAmplitude,
  SingularCovariance,
  SingularFim,
  SingularSystem,
  NonPositiveVariance,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_numerical() const noexcept { return kind_ >= ErrorKind::RankDeficientWeights; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NonIntegerCellCount: return "NonIntegerCellCount";
    case ErrorKind::IndexOutOfFrame: return "IndexOutOfFrame";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::BitCountMismatch: return "BitCountMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidGeometry: return "InvalidGeometry";
    case ErrorKind::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::RankDeficientWeights: return "RankDeficientWeights";
    case ErrorKind::SingularK: return "SingularK";
    case ErrorKind::ZeroAmplitude: return "ZeroAmplitude";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::SingularFim: return "SingularFim";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonPositiveVariance: return "NonPositiveVariance";
  }
  return "Unknown";
}

}  // namespace pnest
