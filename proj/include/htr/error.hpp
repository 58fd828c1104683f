#pragma once

#include <stdexcept>
#include <string>

namespace htr {

// Failure classes surfaced by the library. Tests match on the code, not the
// message text.
enum class Err {
  DigitOutOfRange,
  BadShape,
  BadTarget,
  BadHeader,
  BadLength,
  BadSchedule,
  BadInput,
  DomainError,
  SearchSpaceTooLarge,
  EnumerationTooLarge,
  UnsupportedBranching,
  AnnotationMissing,
  WireError,
  ParseError,
  IoError,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::DigitOutOfRange:     return "DigitOutOfRange";
    case Err::BadShape:            return "BadShape";
    case Err::BadTarget:           return "BadTarget";
    case Err::BadHeader:           return "BadHeader";
    case Err::BadLength:           return "BadLength";
    case Err::BadSchedule:         return "BadSchedule";
    case Err::BadInput:            return "BadInput";
    case Err::DomainError:         return "DomainError";
    case Err::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case Err::EnumerationTooLarge: return "EnumerationTooLarge";
    case Err::UnsupportedBranching:return "UnsupportedBranching";
    case Err::AnnotationMissing:   return "AnnotationMissing";
    case Err::WireError:           return "WireError";
    case Err::ParseError:          return "ParseError";
    case Err::IoError:             return "IoError";
  }
  return "Unknown";
}

class HtrError : public std::runtime_error {
public:
  HtrError(Err code, std::string message, long index = -1)
      : std::runtime_error(std::string(err_name(code)) + ": " + message),
        code_(code),
        index_(index) {}

  Err code() const noexcept { return code_; }

  // Position payload for DigitOutOfRange-style errors; -1 when not applicable.
  long index() const noexcept { return index_; }

private:
  Err code_;
  long index_;
};

}  // namespace htr
