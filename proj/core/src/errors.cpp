#include "plantlab/errors.hpp"

namespace plantlab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::UnsupportedKind: return "UnsupportedKind";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case Errc::NotApplicable: return "NotApplicable";
    case Errc::SupportMismatch: return "SupportMismatch";
    case Errc::EmptyTruncationWindow: return "EmptyTruncationWindow";
    case Errc::InfeasibleExact: return "InfeasibleExact";
    case Errc::TooLarge: return "TooLarge";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IncompatibleDetector: return "IncompatibleDetector";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace plantlab
