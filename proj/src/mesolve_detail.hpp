#pragma once

#include "corrsim/mesolve.hpp"

namespace corrsim::detail {

Qubit validated_initial_state(const ComplexMatrix& rho_s0, const char* who);
std::size_t step_count(double dtau, double tau_final, const char* who);
void check_trace(const Qubit& rho, double tau, const char* who);
ComplexMatrix vacuum_bath(std::size_t nb);

struct Recorder {
  MethodResult* res;
  std::size_t stride;
  const StepObserver* observer;
  bool sticky_neg = false;

  void observe(std::size_t n, double tau, const Qubit& rho,
               const ComplexMatrix* chi, const ComplexMatrix* memory,
               const ComplexMatrix* rho_b);
};

}  // namespace corrsim::detail
