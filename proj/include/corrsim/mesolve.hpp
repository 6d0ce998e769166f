#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrsim/block_ops.hpp"
#include "corrsim/model.hpp"
#include "corrsim/opalg.hpp"

namespace corrsim {

enum class MethodId { ULL2, MLL, NZ2, TCL2, REDFIELD, CR, LINDBLAD };

inline constexpr std::array<MethodId, 7> kAllMethods = {
    MethodId::ULL2, MethodId::MLL,     MethodId::NZ2,     MethodId::TCL2,
    MethodId::REDFIELD, MethodId::CR, MethodId::LINDBLAD};

std::string to_string(MethodId m);
std::optional<MethodId> method_from_string(std::string_view s);

// Snapshot handed to the observer on every grid step.
struct StepView {
  std::size_t step = 0;
  double tau = 0.0;
  Qubit rho_s{};
  const ComplexMatrix* chi = nullptr;     // ULL2 / NZ2 running correlation
  const ComplexMatrix* memory = nullptr;  // NZ2 memory integral
  const ComplexMatrix* rho_b = nullptr;   // ULL2 co-evolved bath state
};
using StepObserver = std::function<void(const StepView&)>;

struct SolverOptions {
  std::size_t sample_stride = 1;
  StepObserver observer;  // optional; invoked on the full grid
};

// Scalar time series for one technique. The solver fills times, rho11,
// coherence and the negative-population flags; comparison columns against
// the exact reference are filled by the scenario runner.
struct MethodResult {
  MethodId method{};
  std::vector<double> times;
  std::vector<double> rho11;
  std::vector<double> coherence;
  std::vector<double> chi_norm;
  std::vector<double> dhs_chi, acc_dhs_chi;
  std::vector<double> td_state, acc_td_state;
  std::vector<int> neg_pop_flag;  // sticky: 1 once a negative population seen
  bool neg_pop_any = false;
  double wall_seconds = 0.0;
};

MethodResult solve_ull2(const ModeSet& modes, const TruncatedBasis& basis,
                        const ComplexMatrix& rho_s0, double dtau,
                        double tau_final, const SolverOptions& opts = {});
MethodResult solve_mll(const ModeSet& modes, const TruncatedBasis& basis,
                       const ComplexMatrix& rho_s0, double dtau,
                       double tau_final, const SolverOptions& opts = {});
MethodResult solve_nz2(const ModeSet& modes, const TruncatedBasis& basis,
                       const ComplexMatrix& rho_s0, double dtau,
                       double tau_final, const SolverOptions& opts = {});
MethodResult solve_tcl2(const ModeSet& modes, const ComplexMatrix& rho_s0,
                        double dtau, double tau_final,
                        const SolverOptions& opts = {});
MethodResult solve_redfield(const ModeSet& modes, const ComplexMatrix& rho_s0,
                            double dtau, double tau_final, double b_width,
                            const SolverOptions& opts = {});
MethodResult solve_cr(const ModeSet& modes, const ComplexMatrix& rho_s0,
                      double dtau, double tau_final, double b_width,
                      const SolverOptions& opts = {});
MethodResult solve_lindblad(const ModeSet& modes, const TruncatedBasis& basis,
                            const ComplexMatrix& rho_s0, double dtau,
                            double tau_final, double b_width,
                            const SolverOptions& opts = {});

MethodResult solve(MethodId m, const ModeSet& modes,
                   const TruncatedBasis& basis, const ComplexMatrix& rho_s0,
                   double dtau, double tau_final, double b_width,
                   const SolverOptions& opts = {});

// Right-hand sides, also used by the solvers themselves.

// -i eps [n, rho] + gamma (2 sm rho sp - {n, rho}) with n = sp sm.
Qubit lindblad_form(double gamma, double epsilon, const Qubit& rho);

Qubit tcl2_rhs(const ModeSet& modes, double tau, const Qubit& rho);
Qubit redfield_rhs(const ModeSet& modes, double b_width, const Qubit& rho);
Qubit cr_rhs(const ModeSet& modes, double tau, double b_width,
             const Qubit& rho, const Qubit& rho0);
Qubit mll_rhs(const ModeSet& modes, double tau, const Qubit& rho);
Qubit nz2_rhs(const ModeSet& modes, double tau, const ComplexMatrix& memory);
Qubit ull2_rhs_sys(const ModeSet& modes, double tau, const Qubit& rho,
                   const ComplexMatrix& rho_b, const ComplexMatrix& chi);

// Fixed interaction-picture generator assembled gap by gap from the
// frequency decomposition of the coupling; for the single-gap qubit it
// coincides with the Redfield generator.
struct LindbladGenerator {
  std::array<Qubit, 4> columns;  // action on the 2x2 basis units E_00..E_11

  Qubit apply(const Qubit& rho) const {
    Qubit out{};
    for (int i = 0; i < 4; ++i) qaxpy(out, rho[i], columns[i]);
    return out;
  }
};
LindbladGenerator build_lindblad_generator(const ModeSet& modes,
                                           const TruncatedBasis& basis,
                                           double b_width, double tau = 0.0);

}  // namespace corrsim
