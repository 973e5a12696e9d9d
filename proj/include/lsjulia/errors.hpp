#pragma once
#include <stdexcept>
#include <string>

namespace lsjulia {

// Caller handed us inputs that violate a documented contract.
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative procedure ran out of budget before reaching its tolerance.
struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual(residual) {}
  double residual;
};

// Filesystem or format failure.
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lsjulia
