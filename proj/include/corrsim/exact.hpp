#pragma once

#include <vector>

#include "corrsim/block_ops.hpp"
#include "corrsim/model.hpp"
#include "corrsim/opalg.hpp"

namespace corrsim {

// Pure total state in the zero/one-excitation sector. Amplitude layout:
// amps[0] = |0,vac>, amps[1] = |1,vac>, amps[1+k] = |0,e_k> for k = 1..M.
struct PureState {
  double time = 0.0;
  std::vector<cplx> amps;

  std::size_t num_modes() const { return amps.size() - 2; }
};

enum class ExactScheme { rk4, eigenprop };

// (|0> + |1>)/sqrt(2) system state with the bath in vacuum.
PureState initial_plus_state(std::size_t num_modes);

double norm2(const PureState& psi);                   // ||psi||^2
double excitation_expectation(const PureState& psi);  // <N>

// Schroedinger-picture trajectory sampled every dtau, psi(0) included.
// rk4: classical fixed-step integration of the amplitude vector.
// eigenprop: one diagonalization of the single-excitation block, then exact
// phases (the |0,vac> amplitude is constant).
std::vector<PureState> evolve_exact(const ModeSet& modes,
                                    const PureState& psi0, double dtau,
                                    double tau_final, ExactScheme scheme);

// Amplitudes conjugated by e^{+i(H_S+H_B)tau}.
PureState to_interaction_picture(const PureState& psi, const ModeSet& modes);

struct ReducedState {
  ComplexMatrix rho_s;   // 2x2
  ComplexMatrix rho_b;   // (M+1)x(M+1)
  ComplexMatrix rho_sb;  // D x D
  ComplexMatrix chi;     // rho_sb - rho_s (x) rho_b
};

ReducedState reduced_and_chi(const PureState& psi, const ModeSet& modes,
                             const TruncatedBasis& basis,
                             bool interaction_picture);

// Fast path used on every grid step: chi and rho_s of an (already rotated)
// state written into a caller buffer.
void chi_exact_into(const PureState& psi, const TruncatedBasis& basis,
                    ComplexMatrix& chi, Qubit* rho_s);

// Trace distance between rho_B(psi) and the vacuum state. rho_B differs
// from  |vac><vac| by a rank-2 update, so the spectrum reduces to a 2x2
// problem on span{e0, u}.
double bath_trace_distance_from_vacuum(const PureState& psi);

}  // namespace corrsim
