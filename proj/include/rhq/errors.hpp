#ifndef RHQ_ERRORS_HPP
#define RHQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rhq {

// Bad or inconsistent user-supplied configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Operation invoked outside the parameter regime where it is defined.
struct RegimeError : std::runtime_error {
  explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// State-space truncation too small for the requested mass tolerance.
struct TruncationError : NumericalError {
  TruncationError(const std::string& what, double tail)
      : NumericalError(what), tail_estimate(tail) {}
  double tail_estimate;
};

// A quantity assumed monotone evaluated non-monotone beyond tolerance.
struct MonotonicityError : NumericalError {
  explicit MonotonicityError(const std::string& what) : NumericalError(what) {}
};

}  // namespace rhq

#endif
