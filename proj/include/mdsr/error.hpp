#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdsr {

enum class Errc {
  InvalidArgument,
  CycleDetected,
  DuplicateContradiction,
  SizeMismatch,
  SelfInclusion,
  UnacceptableSet,
  InsufficientAgents,
  TooLarge,
  WindowTooLarge,
  BudgetExceeded,
  NotStrictOrder,
  Incomplete,
  PreconditionViolated,
  CertificateFailure,
  MalformedFormula,
  InvalidAssignment,
  NotWellFormed,
  MalformedSmti,
  NotPerfect,
  NotStable,
  ParseError,
  ValidationError,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::CycleDetected: return "CycleDetected";
    case Errc::DuplicateContradiction: return "DuplicateContradiction";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::SelfInclusion: return "SelfInclusion";
    case Errc::UnacceptableSet: return "UnacceptableSet";
    case Errc::InsufficientAgents: return "InsufficientAgents";
    case Errc::TooLarge: return "TooLarge";
    case Errc::WindowTooLarge: return "WindowTooLarge";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::NotStrictOrder: return "NotStrictOrder";
    case Errc::Incomplete: return "Incomplete";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::CertificateFailure: return "CertificateFailure";
    case Errc::MalformedFormula: return "MalformedFormula";
    case Errc::InvalidAssignment: return "InvalidAssignment";
    case Errc::NotWellFormed: return "NotWellFormed";
    case Errc::MalformedSmti: return "MalformedSmti";
    case Errc::NotPerfect: return "NotPerfect";
    case Errc::NotStable: return "NotStable";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// True for errors raised by resource guards rather than bad input.
constexpr bool is_guard_error(Errc c) {
  return c == Errc::TooLarge || c == Errc::WindowTooLarge || c == Errc::BudgetExceeded;
}

}  // namespace mdsr
