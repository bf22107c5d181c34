#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsac {

/// Error categories surfaced by the library. The CLI prints the category
/// name as the machine-parsable `kind=` field.
enum class ErrorKind {
  InvalidArgument,
  UnsupportedGeometry,
  Solvability,
  Stability,
  NonFinite,
  Config,
  Format,
  Truncated,
  Mismatch,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::UnsupportedGeometry: return "unsupported_geometry";
    case ErrorKind::Solvability: return "solvability";
    case ErrorKind::Stability: return "stability";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::Config: return "config";
    case ErrorKind::Format: return "format";
    case ErrorKind::Truncated: return "truncated";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nsac
