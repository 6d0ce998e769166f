#pragma once

#include <map>
#include <span>

#include "corrsim/mesolve.hpp"
#include "corrsim/model.hpp"
#include "corrsim/opalg.hpp"

namespace corrsim {

// System-bath correlation operator reconstructed from a reduced technique.
// For LINDBLAD the matrix is the sum of the per-gap operators and gap_set
// holds them individually (keyed by the sign of the gap, +1 for +omega0);
// the sum coincides with the Redfield correlation for this single-gap model
// but is not claimed to be the technique's total correlation.
struct CorrelationOp {
  ComplexMatrix matrix;
  MethodId method{};
  double time = 0.0;
  std::map<int, ComplexMatrix> gap_set;
};

// All builders evaluate in the interaction picture with the vacuum bath
// initial state (chi_mll takes its bath state explicitly).

// Trapezoid accumulation over the solver grid of the three-term corrected
// integrand; history[n] is rho_S(n*dtau) and tau = (history.size()-1)*dtau.
CorrelationOp chi_nz2(std::span<const Qubit> history, double dtau,
                      const ModeSet& modes, const TruncatedBasis& basis);

CorrelationOp chi_tcl2(const Qubit& rho_tau, const ModeSet& modes,
                       const TruncatedBasis& basis, double tau);
CorrelationOp chi_redfield(const Qubit& rho_tau, const ModeSet& modes,
                           const TruncatedBasis& basis, double tau,
                           double b_width);
CorrelationOp chi_cr(const Qubit& rho_tau, const Qubit& rho_0,
                     const ModeSet& modes, const TruncatedBasis& basis,
                     double tau, double b_width);
CorrelationOp chi_mll(const Qubit& rho_tau, const ComplexMatrix& rho_b0,
                      const ModeSet& modes, const TruncatedBasis& basis,
                      double tau);
CorrelationOp chi_lindblad_set(const Qubit& rho_tau, const ModeSet& modes,
                               const TruncatedBasis& basis, double tau,
                               double b_width);

// In-place variants used on the full integration grid.
void chi_tcl2_into(ComplexMatrix& out, const Qubit& rho_tau,
                   const ModeSet& modes, double tau);
void chi_redfield_into(ComplexMatrix& out, const Qubit& rho_tau,
                       const ModeSet& modes, double tau, double b_width);
// out = chi_R(rho_tau, tau) - chi_r0 with a caller-provided chi_R(0).
void chi_cr_into(ComplexMatrix& out, const Qubit& rho_tau,
                 const ComplexMatrix& chi_r0, const ModeSet& modes, double tau,
                 double b_width);
void chi_mll_into(ComplexMatrix& out, const Qubit& rho_tau,
                  const ComplexMatrix& rho_b0, const ModeSet& modes,
                  double tau);
// Sum over gaps only (the runner's metric object for LINDBLAD).
void chi_lindblad_sum_into(ComplexMatrix& out, const Qubit& rho_tau,
                           const ModeSet& modes, double tau, double b_width);

// Residual of the universal reconstruction: the Frobenius norm of
//   method_rhs - ( -i[Tr_B[H_I(tau) rho_B_eff], rho_S]
//                  - i Tr_B[H_I(tau), chi] ).
// rho_B_eff is the bath state the technique carries: its co-evolved state
// for ULL2, the initial bath state otherwise.
double unfold_consistency(MethodId method, double tau,
                          const ComplexMatrix& chi, const Qubit& rho_s,
                          const ComplexMatrix& rho_b_eff, const ModeSet& modes,
                          const TruncatedBasis& basis,
                          const Qubit& method_rhs);

}  // namespace corrsim
