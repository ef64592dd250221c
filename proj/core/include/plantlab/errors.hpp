#pragma once

#include <stdexcept>
#include <string>

namespace plantlab {

// Failure categories surfaced by the library. Every throw site names the
// offending parameter or dimension in the message.
enum class Errc {
  InvalidParams,
  UnsupportedKind,
  DimensionMismatch,
  RejectionBudgetExceeded,
  NotApplicable,
  SupportMismatch,
  EmptyTruncationWindow,
  InfeasibleExact,
  TooLarge,
  ShapeMismatch,
  IncompatibleDetector,
  ConfigError,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace plantlab
