#include "kboot/error.hpp"

namespace kboot {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidRho: return "InvalidRho";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidSecondLevelLaw: return "InvalidSecondLevelLaw";
    case ErrorCode::NotDiagonal: return "NotDiagonal";
    case ErrorCode::WindowError: return "WindowError";
    case ErrorCode::DegenerateLayout: return "DegenerateLayout";
    case ErrorCode::LengthError: return "LengthError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
  }
  return "UnknownError";
}

}  // namespace kboot
