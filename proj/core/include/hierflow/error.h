//
// Project hierflow - Copyright 2026 The hierflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef HIERFLOW_ERROR_H_
#define HIERFLOW_ERROR_H_

#include <stdexcept>
#include <string>

namespace hierflow {

// Raised when a numerical routine produces NaN/Inf or fails to converge.
class NumericalError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when a molecule does not fit the configured token budgets.
class BudgetError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised by the ODE integrator; carries the index of the failing step.
class SolverError: public NumericalError {
public:
  SolverError(int step, const std::string &what)
      : NumericalError("step " + std::to_string(step) + ": " + what),
        step_(step) { }

  int step() const { return step_; }

private:
  int step_;
};

}  // namespace hierflow

#endif  // HIERFLOW_ERROR_H_
