#pragma once

#include <stdexcept>
#include <string>

namespace mspace {

/// Category attached to every library exception; the CLI maps these onto exit codes.
enum class ErrorKind {
  domain,               // argument outside the mathematical domain (Im z <= 0, a < 1, ...)
  pole,                 // evaluation at a pole of the meromorphic continuation
  constant_function,    // tau = 0 and no zeros
  level_set_out_of_window,
  window_too_small,
  density_violation,
  quadrature,           // tolerance unreachable within the subdivision limit
  empty_family,
  continuation_obstructed,
  config
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown when adaptive quadrature stops before reaching its tolerance. Carries the estimate.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : Error(ErrorKind::quadrature, what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace mspace
