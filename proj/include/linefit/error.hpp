#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace linefit {

enum class ErrorCode {
  EmptySet,
  InsufficientPoints,
  VerticalLineForAlgebraic,
  NoConvergence,
  TooLarge,
  ParseError,
  EmptyInput,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::VerticalLineForAlgebraic: return "VerticalLineForAlgebraic";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by the L^p solvers; carries the best iterate so callers can still
// inspect how far the optimizer got.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, std::array<double, 2> best_params,
                     double best_objective, double gradient_norm)
      : Error(ErrorCode::NoConvergence, what),
        best_params_(best_params),
        best_objective_(best_objective),
        gradient_norm_(gradient_norm) {}

  std::array<double, 2> best_params() const noexcept { return best_params_; }
  double best_objective() const noexcept { return best_objective_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  std::array<double, 2> best_params_;
  double best_objective_;
  double gradient_norm_;
};

// Location-carrying parse error. line and field are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t field)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", field " +
                                         std::to_string(field) + ": " + what),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::size_t field_;
};

}  // namespace linefit
