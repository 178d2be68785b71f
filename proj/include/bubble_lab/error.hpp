#pragma once

#include <stdexcept>
#include <string>

namespace bubble_lab {

enum class ErrorKind {
  invalid_argument,
  no_positive_partner,
  unsupported_regime,
  bracket_not_found,
  non_convergence,
  fit_residual_too_large,
  divergent_integral,
  coincident_points,
  outside_collar,
  outside_domain,
  no_interior_minimum,
  missing_constant,
  insufficient_critical_points,
  inconclusive,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::no_positive_partner: return "no-positive-partner";
    case ErrorKind::unsupported_regime: return "unsupported-regime";
    case ErrorKind::bracket_not_found: return "bracket-not-found";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::fit_residual_too_large: return "fit-residual-too-large";
    case ErrorKind::divergent_integral: return "divergent-integral";
    case ErrorKind::coincident_points: return "coincident-points";
    case ErrorKind::outside_collar: return "outside-collar";
    case ErrorKind::outside_domain: return "outside-domain";
    case ErrorKind::no_interior_minimum: return "no-interior-minimum";
    case ErrorKind::missing_constant: return "missing-constant";
    case ErrorKind::insufficient_critical_points: return "insufficient-critical-points";
    case ErrorKind::inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// Domain error raised by every module; `kind()` identifies the failure mode.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bubble_lab
