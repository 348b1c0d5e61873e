#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hypres {

enum class ErrorKind {
  invalid_element,
  not_hyperbolic,
  domain,
  pole,
  convergence_failure,
  unsupported,
  degenerate,
  consistency,
  structural_inconsistency,
  no_eigenvalue,
  conditioning,
  accuracy_loss,
  input,
  fit,
  parse,
  resolution,
  missing_cache,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_element: return "invalid-element";
    case ErrorKind::not_hyperbolic: return "not-hyperbolic";
    case ErrorKind::domain: return "domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::convergence_failure: return "convergence-failure";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::structural_inconsistency: return "structural-inconsistency";
    case ErrorKind::no_eigenvalue: return "no-eigenvalue";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::accuracy_loss: return "accuracy-loss";
    case ErrorKind::input: return "input";
    case ErrorKind::fit: return "fit";
    case ErrorKind::parse: return "parse";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::missing_cache: return "missing-cache";
  }
  return "unknown";
}

// Library-wide exception. `detail` carries a numeric payload where one makes
// sense: the pole location, the best estimate on convergence failure, the
// condition estimate on conditioning failure. NaN otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        double detail = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        detail_(detail) {}

  ErrorKind kind() const noexcept { return kind_; }
  double detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  double detail_;
};

}  // namespace hypres
