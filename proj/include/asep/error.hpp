#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asep {

/// Failure categories raised by the library. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_argument,
  pole_at_origin,
  kernel_singularity,
  bad_contour,
  precision_regime,
  degenerate_tau,
  singular,
  no_left_drift,
  inner_quadrature_failure,
  empty_sum,
  degenerate_sample,
  outside_convergence_disk,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures of the numerics themselves (as opposed to bad input).
bool is_numerical_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace asep
