#ifndef HYREP_ERRORS_HPP
#define HYREP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hyrep {

enum class ErrorCode {
  SyntaxError,
  UnboundVariable,
  DuplicateVariable,
  MissingInit,
  UnknownState,
  DeadlockState,
  DuplicateTransition,
  NotAcyclic,
  WouldDeadlock,
  EmptyTraceSet,
  TooManyVariables,
  TooManyPropositions,
  UnsupportedShape,
  TooLarge,
  StrategyMismatch,
  BadInput,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::MissingInit: return "MissingInit";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::DeadlockState: return "DeadlockState";
    case ErrorCode::DuplicateTransition: return "DuplicateTransition";
    case ErrorCode::NotAcyclic: return "NotAcyclic";
    case ErrorCode::WouldDeadlock: return "WouldDeadlock";
    case ErrorCode::EmptyTraceSet: return "EmptyTraceSet";
    case ErrorCode::TooManyVariables: return "TooManyVariables";
    case ErrorCode::TooManyPropositions: return "TooManyPropositions";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::StrategyMismatch: return "StrategyMismatch";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyrep

#endif
