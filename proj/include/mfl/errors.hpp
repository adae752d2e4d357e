#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfl {

enum class ErrorKind {
  InstanceTooLarge,
  ShapeError,
  NotHermitian,
  NotSwapSymmetric,
  NotSymmetric,
  NotPSD,
  BadArity,
  BasisMismatch,
  PicardNoConvergence,
  GridTooCoarse,
  ArityCapExceeded,
  FreeTheory,
  TOutOfRange,
  BoundViolation,
  InvalidConfig,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotSwapSymmetric: return "NotSwapSymmetric";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::BadArity: return "BadArity";
    case ErrorKind::BasisMismatch: return "BasisMismatch";
    case ErrorKind::PicardNoConvergence: return "PicardNoConvergence";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::ArityCapExceeded: return "ArityCapExceeded";
    case ErrorKind::FreeTheory: return "FreeTheory";
    case ErrorKind::TOutOfRange: return "TOutOfRange";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mfl
