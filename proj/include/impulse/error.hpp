#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace impulse {

enum class ErrorKind {
  InvalidParameter,
  DegenerateSpectrum,
  OutOfRange,
  DegenerateSlope,
  Singularity,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DegenerateSlope: return "DegenerateSlope";
    case ErrorKind::Singularity: return "Singularity";
  }
  return "Unknown";
}

/// Every library failure carries a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace impulse
