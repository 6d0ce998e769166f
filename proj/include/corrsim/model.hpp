#pragma once

#include <functional>
#include <vector>

#include "corrsim/opalg.hpp"

namespace corrsim {

// Modes closer to resonance than this are treated as exactly resonant:
// principal-value sums skip them and phase integrals take analytic limits.
inline constexpr double kResonanceTol = 1e-12;

struct SpectralDensity {
  enum class Kind { ohmic, lorentzian };
  Kind kind = Kind::ohmic;
  double eta = 0.0;      // ohmic coupling scale
  double omega_c = 0.0;  // ohmic cutoff
  double gamma = 0.0;    // lorentzian coupling strength
  double lambda = 0.0;   // lorentzian width (inverse bath correlation time)

  static SpectralDensity make_ohmic(double eta, double omega_c);
  static SpectralDensity make_lorentzian(double gamma, double lambda);
  double operator()(double omega) const;
};

// Discretized bath: omega_k = k*delta_omega and g_k = sqrt(J(omega_k)*dw),
// k = 1..M. Mode k couples to bath basis index b = k.
struct ModeSet {
  std::size_t count = 0;  // M
  double delta_omega = 0.0;
  double omega0 = 1.0;
  std::vector<double> omegas;  // omegas[k-1] = k*delta_omega
  std::vector<double> gs;
  double sum_rule_ratio = 1.0;  // sum g_k^2 / integral of J over [0, M*dw]

  double detuning(std::size_t k) const { return omega0 - omegas[k - 1]; }
  double coupling(std::size_t k) const { return gs[k - 1]; }
  TruncatedBasis basis() const { return TruncatedBasis{count}; }
};

ModeSet discretize(const std::function<double(double)>& j, std::size_t modes,
                   double delta_omega, double omega0);
ModeSet discretize(const SpectralDensity& j, std::size_t modes,
                   double delta_omega, double omega0);

struct RatePair {
  double gamma = 0.0;    // decay rate
  double epsilon = 0.0;  // Lamb-type shift
};

// Exchange coupling H_I = sum_k g_k (A_k + A_k^dag) in the truncated basis,
// with A_k the single-entry operator |0,e_k><1,vac|. Transitions that would
// create a second bath excitation fall outside the basis and are dropped.
struct Interaction {
  TruncatedBasis basis;
  ComplexMatrix h_i;
  std::vector<double> sys_phase;   // diagonal of H_S per flat index
  std::vector<double> bath_phase;  // diagonal of H_B per flat index

  ComplexMatrix mode_op(std::size_t k) const;  // A_k, k = 1..M
};

Interaction build_interaction(const ModeSet& modes,
                              const TruncatedBasis& basis);

// H_I(tau) = sum_k g_k (A_k e^{-i(w0-w_k)tau} + A_k^dag e^{+i(w0-w_k)tau}).
ComplexMatrix hi_interaction_picture(const ModeSet& modes,
                                     const TruncatedBasis& basis, double tau);

// Per-mode weights of H_I(tau): w[k] = g_k e^{-i(w0-w_k)tau}, w[0] = 0.
// H_I(tau) has bath-block structure [[0, w e0^T],[e0 w^dag, 0]].
std::vector<cplx> coupling_phases(const ModeSet& modes, double tau);

// Bath correlation kernel L(u) = sum_k g_k^2 e^{i(w0-w_k)u}.
cplx kernel_L(const ModeSet& modes, double u);

// Finite-time phase integral int_0^tau e^{-i(w0-w_k)s} ds, k = 1..M.
cplx phi(const ModeSet& modes, std::size_t k, double tau);

// Markovian rates: gamma = sum_k g_k^2 * pi * delta_b(w0-w_k) with the
// Gaussian-mollified delta delta_b(x) = e^{-x^2/b^2}/(b sqrt(pi));
// epsilon = principal-value sum of g_k^2/(w0-w_k) over non-resonant modes.
RatePair redfield_rates(const ModeSet& modes, double b_width);

// Finite-time rates (Re, Im) of int_0^tau L(u) du.
RatePair tcl2_rates(const ModeSet& modes, double tau);

// Rates (Re, Im) of int_0^infty L(s+tau) ds under the same delta/PV scheme
// as redfield_K: per mode g_k^2 e^{i(w0-w_k)tau} (pi delta_b + i PV).
// At tau = 0 they coincide with redfield_rates.
RatePair cr_rates(const ModeSet& modes, double tau, double b_width);

// Half-line kernel operator K(tau) = int_0^infty H_I(tau-s) ds evaluated
// per mode: pi g_k delta_b(w0-w_k)[A_k(tau)+A_k^dag(tau)]
//           + i g_k/(w0-w_k) [A_k(tau)-A_k^dag(tau)] (resonant modes skipped
// in the second part). Upper-block weights returned by the _weights variant.
ComplexMatrix redfield_K(const ModeSet& modes, const TruncatedBasis& basis,
                         double tau, double b_width);
std::vector<cplx> redfield_K_weights(const ModeSet& modes, double tau,
                                     double b_width);

// Gap components of H_I(tau) for the two system gaps +w0 (lowering side)
// and -w0 (raising side); gap_sign is +1 or -1. Their sum is H_I(tau).
ComplexMatrix hi_gap_component(const ModeSet& modes,
                               const TruncatedBasis& basis, int gap_sign,
                               double tau);
// Upper/lower block weights of the gap component (one of them is zero).
void gap_component_weights(const ModeSet& modes, int gap_sign, double tau,
                           std::vector<cplx>& upper, std::vector<cplx>& lower);

inline double gaussian_delta(double x, double b) {
  return std::exp(-(x / b) * (x / b)) / (b * std::sqrt(3.14159265358979323846));
}

}  // namespace corrsim
