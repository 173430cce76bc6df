#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermodtn {

enum class ErrorCode {
  DivisionByZeroJet,
  SqrtBranchError,
  IndexOutOfOrder,
  IncompatibleJets,
  NotRepresentable,
  SingularMetric,
  ZeroCovector,
  InadmissibleMaterial,
  InsufficientJetOrder,
  ResidualTooLarge,
  InconsistentSymbol,
  RankDeficientLayer,
  ToleranceExceeded,
  IllConditionedFit,
  ModeDeficiency,
  NearDefectiveModes,
  SolverSingular,
  NotConverged,
  ManifestError,
  IoError,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZeroJet: return "DivisionByZeroJet";
    case ErrorCode::SqrtBranchError: return "SqrtBranchError";
    case ErrorCode::IndexOutOfOrder: return "IndexOutOfOrder";
    case ErrorCode::IncompatibleJets: return "IncompatibleJets";
    case ErrorCode::NotRepresentable: return "NotRepresentable";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::ZeroCovector: return "ZeroCovector";
    case ErrorCode::InadmissibleMaterial: return "InadmissibleMaterial";
    case ErrorCode::InsufficientJetOrder: return "InsufficientJetOrder";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::InconsistentSymbol: return "InconsistentSymbol";
    case ErrorCode::RankDeficientLayer: return "RankDeficientLayer";
    case ErrorCode::ToleranceExceeded: return "ToleranceExceeded";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::ModeDeficiency: return "ModeDeficiency";
    case ErrorCode::NearDefectiveModes: return "NearDefectiveModes";
    case ErrorCode::SolverSingular: return "SolverSingular";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace thermodtn
