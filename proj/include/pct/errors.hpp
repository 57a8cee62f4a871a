#ifndef PCT_ERRORS_HPP
#define PCT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pct {

enum class ErrorKind {
  Syntax,
  UnknownIdentifier,
  DivisionByZero,
  Domain,
  Exactness,
  Budget,
  Range,
  RuleMismatch,
  NotClosed,
  PolicyIncomplete,
  UndefinedAt,
  NoStrictState,
  RoundsExhausted,
  SequenceExhausted,
  EscapeBoundViolated,
  PhiFailsAtInit,
  Io,
  Usage,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Exactness: return "ExactnessViolation";
    case ErrorKind::Budget: return "BudgetExceeded";
    case ErrorKind::Range: return "RangeError";
    case ErrorKind::RuleMismatch: return "RuleMismatch";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::PolicyIncomplete: return "PolicyIncomplete";
    case ErrorKind::UndefinedAt: return "UndefinedAt";
    case ErrorKind::NoStrictState: return "NoStrictState";
    case ErrorKind::RoundsExhausted: return "RoundsExhausted";
    case ErrorKind::SequenceExhausted: return "SequenceExhausted";
    case ErrorKind::EscapeBoundViolated: return "EscapeBoundViolated";
    case ErrorKind::PhiFailsAtInit: return "PhiFailsAtInit";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Usage: return "UsageError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::size_t position = npos)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind),
        position_(position) {}

  ErrorKind kind() const { return kind_; }
  bool has_position() const { return position_ != npos; }
  std::size_t position() const { return position_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  ErrorKind kind_;
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::size_t position = Error::npos) {
  throw Error(kind, message, position);
}

}  // namespace pct

#endif
