#include "corrsim/model.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "corrsim/errors.hpp"

namespace corrsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpectralDensity SpectralDensity::make_ohmic(double eta, double omega_c) {
  if (eta <= 0.0 || omega_c <= 0.0)
    throw ConfigError("ohmic spectral density needs eta > 0 and omega_c > 0");
  SpectralDensity j;
  j.kind = Kind::ohmic;
  j.eta = eta;
  j.omega_c = omega_c;
  return j;
}

SpectralDensity SpectralDensity::make_lorentzian(double gamma, double lambda) {
  if (gamma <= 0.0 || lambda <= 0.0)
    throw ConfigError(
        "lorentzian spectral density needs gamma > 0 and lambda > 0");
  SpectralDensity j;
  j.kind = Kind::lorentzian;
  j.gamma = gamma;
  j.lambda = lambda;
  return j;
}

double SpectralDensity::operator()(double omega) const {
  if (kind == Kind::ohmic)
    return eta * omega / kPi * std::exp(-omega / omega_c);
  return gamma * lambda * lambda /
         (2.0 * kPi * (omega * omega + lambda * lambda));
}

ModeSet discretize(const std::function<double(double)>& j, std::size_t modes,
                   double delta_omega, double omega0) {
  if (modes < 1) throw ConfigError("discretize: need at least one mode");
  if (delta_omega <= 0.0) throw ConfigError("discretize: delta_omega <= 0");

  ModeSet set;
  set.count = modes;
  set.delta_omega = delta_omega;
  set.omega0 = omega0;
  set.omegas.resize(modes);
  set.gs.resize(modes);
  double coupling_sum = 0.0;
  for (std::size_t k = 1; k <= modes; ++k) {
    const double w = static_cast<double>(k) * delta_omega;
    const double jw = j(w);
    if (jw < 0.0) throw ConfigError("discretize: spectral density < 0");
    set.omegas[k - 1] = w;
    set.gs[k - 1] = std::sqrt(jw * delta_omega);
    coupling_sum += jw * delta_omega;
  }

  // Sum rule sum_k g_k^2 ~ int_0^{M dw} J, checked by Simpson quadrature.
  const double omega_max = static_cast<double>(modes) * delta_omega;
  const std::size_t panels = 4096;
  const double h = omega_max / static_cast<double>(panels);
  double integral = j(0.0) + j(omega_max);
  for (std::size_t i = 1; i < panels; ++i)
    integral += (i % 2 ? 4.0 : 2.0) * j(static_cast<double>(i) * h);
  integral *= h / 3.0;

  set.sum_rule_ratio = integral > 0.0 ? coupling_sum / integral : 1.0;
  if (std::abs(set.sum_rule_ratio - 1.0) > 0.02) {
    std::cerr << "warning: discretized coupling sum " << coupling_sum
              << " deviates from integral of J " << integral
              << " by more than 2%\n";
  }
  return set;
}

ModeSet discretize(const SpectralDensity& j, std::size_t modes,
                   double delta_omega, double omega0) {
  return discretize([&j](double w) { return j(w); }, modes, delta_omega,
                    omega0);
}

ComplexMatrix Interaction::mode_op(std::size_t k) const {
  ComplexMatrix a(basis.dim());
  a(basis.index(0, k), basis.index(1, 0)) = 1.0;
  return a;
}

Interaction build_interaction(const ModeSet& modes,
                              const TruncatedBasis& basis) {
  if (basis.num_modes != modes.count)
    throw ConfigError("build_interaction: basis and mode set disagree on M");
  Interaction out;
  out.basis = basis;
  out.h_i = ComplexMatrix(basis.dim());
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g = modes.coupling(k);
    out.h_i(basis.index(0, k), basis.index(1, 0)) = g;
    out.h_i(basis.index(1, 0), basis.index(0, k)) = g;
  }
  out.sys_phase.resize(basis.dim());
  out.bath_phase.resize(basis.dim());
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t b = 0; b <= modes.count; ++b) {
      const std::size_t i = basis.index(s, b);
      out.sys_phase[i] = s ? modes.omega0 : 0.0;
      out.bath_phase[i] = b > 0 ? modes.omegas[b - 1] : 0.0;
    }
  return out;
}

std::vector<cplx> coupling_phases(const ModeSet& modes, double tau) {
  std::vector<cplx> w(modes.count + 1);
  for (std::size_t k = 1; k <= modes.count; ++k) {
    w[k] = modes.coupling(k) *
           std::exp(cplx(0.0, -modes.detuning(k) * tau));
  }
  return w;
}

ComplexMatrix hi_interaction_picture(const ModeSet& modes,
                                     const TruncatedBasis& basis, double tau) {
  if (basis.num_modes != modes.count)
    throw ConfigError("hi_interaction_picture: basis mismatch");
  ComplexMatrix h(basis.dim());
  const std::vector<cplx> w = coupling_phases(modes, tau);
  for (std::size_t k = 1; k <= modes.count; ++k) {
    h(basis.index(0, k), basis.index(1, 0)) = w[k];
    h(basis.index(1, 0), basis.index(0, k)) = std::conj(w[k]);
  }
  return h;
}

cplx kernel_L(const ModeSet& modes, double u) {
  cplx acc{};
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g = modes.coupling(k);
    acc += g * g * std::exp(cplx(0.0, modes.detuning(k) * u));
  }
  return acc;
}

cplx phi(const ModeSet& modes, std::size_t k, double tau) {
  const double d = modes.detuning(k);
  if (std::abs(d) < kResonanceTol) return {tau, 0.0};
  return (1.0 - std::exp(cplx(0.0, -d * tau))) / cplx(0.0, d);
}

RatePair redfield_rates(const ModeSet& modes, double b_width) {
  if (b_width <= 0.0) throw ConfigError("redfield_rates: b_width <= 0");
  RatePair r;
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g2 = modes.coupling(k) * modes.coupling(k);
    const double d = modes.detuning(k);
    r.gamma += g2 * kPi * gaussian_delta(d, b_width);
    if (std::abs(d) >= kResonanceTol) r.epsilon += g2 / d;
  }
  return r;
}

RatePair tcl2_rates(const ModeSet& modes, double tau) {
  RatePair r;
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g2 = modes.coupling(k) * modes.coupling(k);
    const double d = modes.detuning(k);
    if (std::abs(d) < kResonanceTol) {
      r.gamma += g2 * tau;
    } else {
      r.gamma += g2 * std::sin(d * tau) / d;
      r.epsilon += g2 * (1.0 - std::cos(d * tau)) / d;
    }
  }
  return r;
}

RatePair cr_rates(const ModeSet& modes, double tau, double b_width) {
  if (b_width <= 0.0) throw ConfigError("cr_rates: b_width <= 0");
  // (Re, Im) of sum_k g_k^2 e^{i(w0-w_k)tau} (pi delta_b(w0-w_k) + i PV/..),
  // the same mollification the kernel operator K(tau) carries; keeping the
  // phase on the delta part is what lets the corrected equation match its
  // own reconstructed correlation operator exactly.
  RatePair r;
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g2 = modes.coupling(k) * modes.coupling(k);
    const double d = modes.detuning(k);
    const double del = kPi * gaussian_delta(d, b_width);
    r.gamma += g2 * std::cos(d * tau) * del;
    r.epsilon += g2 * std::sin(d * tau) * del;
    if (std::abs(d) >= kResonanceTol) {
      r.gamma -= g2 * std::sin(d * tau) / d;
      r.epsilon += g2 * std::cos(d * tau) / d;
    }
  }
  return r;
}

std::vector<cplx> redfield_K_weights(const ModeSet& modes, double tau,
                                     double b_width) {
  if (b_width <= 0.0) throw ConfigError("redfield_K: b_width <= 0");
  std::vector<cplx> w(modes.count + 1);
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const double g = modes.coupling(k);
    const double d = modes.detuning(k);
    cplx coeff(kPi * gaussian_delta(d, b_width), 0.0);
    if (std::abs(d) >= kResonanceTol) coeff += cplx(0.0, 1.0 / d);
    w[k] = g * coeff * std::exp(cplx(0.0, -d * tau));
  }
  return w;
}

ComplexMatrix redfield_K(const ModeSet& modes, const TruncatedBasis& basis,
                         double tau, double b_width) {
  if (basis.num_modes != modes.count)
    throw ConfigError("redfield_K: basis mismatch");
  ComplexMatrix k_op(basis.dim());
  const std::vector<cplx> w = redfield_K_weights(modes, tau, b_width);
  for (std::size_t k = 1; k <= modes.count; ++k) {
    k_op(basis.index(0, k), basis.index(1, 0)) = w[k];
    k_op(basis.index(1, 0), basis.index(0, k)) = std::conj(w[k]);
  }
  return k_op;
}

void gap_component_weights(const ModeSet& modes, int gap_sign, double tau,
                           std::vector<cplx>& upper,
                           std::vector<cplx>& lower) {
  if (gap_sign != 1 && gap_sign != -1)
    throw ConfigError("gap_component_weights: gap_sign must be +1 or -1");
  upper.assign(modes.count + 1, cplx{});
  lower.assign(modes.count + 1, cplx{});
  // +w0 gap carries the qubit-lowering part (upper bath block), -w0 the
  // raising part.
  for (std::size_t k = 1; k <= modes.count; ++k) {
    const cplx w =
        modes.coupling(k) * std::exp(cplx(0.0, -modes.detuning(k) * tau));
    if (gap_sign > 0)
      upper[k] = w;
    else
      lower[k] = w;
  }
}

ComplexMatrix hi_gap_component(const ModeSet& modes,
                               const TruncatedBasis& basis, int gap_sign,
                               double tau) {
  if (basis.num_modes != modes.count)
    throw ConfigError("hi_gap_component: basis mismatch");
  std::vector<cplx> up, lo;
  gap_component_weights(modes, gap_sign, tau, up, lo);
  ComplexMatrix h(basis.dim());
  for (std::size_t k = 1; k <= modes.count; ++k) {
    h(basis.index(0, k), basis.index(1, 0)) = up[k];
    h(basis.index(1, 0), basis.index(0, k)) = std::conj(lo[k]);
  }
  return h;
}

}  // namespace corrsim
