#pragma once

#include <stdexcept>
#include <string>

namespace sbridge {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NegativeEntry,
  NotNormalized,
  IndexOutOfRange,
  NonPositiveTemperature,
  HorizonMismatch,
  ZeroEntry,
  NonPositiveKernel,
  MaxIterationsExceeded,
  NotConverged,
  InfeasibleSupport,
  EnumerationBudgetExceeded,
  NoFeasiblePath,
  NotPrimitive,
  OracleScaleExceeded,
  IrrationalMarginals,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

// True for errors caused by malformed or inconsistent input, as opposed to a
// numerical procedure that could not produce an answer.
bool is_input_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by iterative solvers; carries the last measured step so callers can
// judge how far from convergence the iteration stopped.
class ConvergenceError : public Error {
 public:
  ConvergenceError(ErrorCode code, const std::string& what, double last_step,
                   long iterations)
      : Error(code, what), last_step_(last_step), iterations_(iterations) {}

  double last_step() const noexcept { return last_step_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double last_step_;
  long iterations_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace sbridge
