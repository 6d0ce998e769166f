#include "corrsim/exact.hpp"

#include <cmath>
#include <string>

#include "corrsim/errors.hpp"

namespace corrsim {

namespace {

constexpr double kNormDriftAbort = 1e-6;

void require_modes(const PureState& psi, const ModeSet& modes) {
  if (psi.num_modes() != modes.count)
    throw ConfigError("pure state and mode set disagree on M");
}

// dpsi = -i H psi with the arrowhead single-excitation block; |0,vac> is
// annihilated by every term.
void schroedinger_rhs(const ModeSet& modes, const std::vector<cplx>& psi,
                      std::vector<cplx>& out) {
  const std::size_t m = modes.count;
  out[0] = cplx{};
  cplx acc = modes.omega0 * psi[1];
  for (std::size_t k = 1; k <= m; ++k) acc += modes.coupling(k) * psi[1 + k];
  out[1] = cplx(0.0, -1.0) * acc;
  for (std::size_t k = 1; k <= m; ++k) {
    out[1 + k] = cplx(0.0, -1.0) * (modes.coupling(k) * psi[1] +
                                    modes.omegas[k - 1] * psi[1 + k]);
  }
}

}  // namespace

PureState initial_plus_state(std::size_t num_modes) {
  PureState psi;
  psi.amps.assign(num_modes + 2, cplx{});
  psi.amps[0] = 1.0 / std::sqrt(2.0);
  psi.amps[1] = 1.0 / std::sqrt(2.0);
  return psi;
}

double norm2(const PureState& psi) {
  double acc = 0.0;
  for (const cplx& z : psi.amps) acc += std::norm(z);
  return acc;
}

double excitation_expectation(const PureState& psi) {
  double acc = 0.0;
  for (std::size_t i = 1; i < psi.amps.size(); ++i)
    acc += std::norm(psi.amps[i]);
  return acc;
}

std::vector<PureState> evolve_exact(const ModeSet& modes,
                                    const PureState& psi0, double dtau,
                                    double tau_final, ExactScheme scheme) {
  require_modes(psi0, modes);
  if (dtau <= 0.0) throw ConfigError("evolve_exact: dtau <= 0");
  if (std::abs(norm2(psi0) - 1.0) > 1e-9)
    throw ConfigError("evolve_exact: initial state not normalized");
  const std::size_t nsteps =
      static_cast<std::size_t>(std::llround(tau_final / dtau));

  std::vector<PureState> traj;
  traj.reserve(nsteps + 1);

  if (scheme == ExactScheme::eigenprop) {
    const std::size_t nb = modes.count + 1;
    ComplexMatrix h1(nb);  // basis {|1,vac>, |0,e_k>}
    h1(0, 0) = modes.omega0;
    for (std::size_t k = 1; k <= modes.count; ++k) {
      h1(k, k) = modes.omegas[k - 1];
      h1(0, k) = modes.coupling(k);
      h1(k, 0) = modes.coupling(k);
    }
    const EigenSystem es = hermitian_eigensystem(h1);
    std::vector<cplx> coef(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      cplx acc = std::conj(es.vectors(0, j)) * psi0.amps[1];
      for (std::size_t k = 1; k <= modes.count; ++k)
        acc += std::conj(es.vectors(k, j)) * psi0.amps[1 + k];
      coef[j] = acc;
    }
    std::vector<cplx> phased(nb);
    for (std::size_t n = 0; n <= nsteps; ++n) {
      const double tau = static_cast<double>(n) * dtau;
      PureState psi;
      psi.time = tau;
      psi.amps.assign(modes.count + 2, cplx{});
      psi.amps[0] = psi0.amps[0];
      for (std::size_t j = 0; j < nb; ++j)
        phased[j] = std::exp(cplx(0.0, -es.values[j] * tau)) * coef[j];
      for (std::size_t r = 0; r < nb; ++r) {
        cplx acc{};
        const cplx* row = es.vectors.row(r);
        for (std::size_t j = 0; j < nb; ++j) acc += row[j] * phased[j];
        psi.amps[r == 0 ? 1 : 1 + r] = acc;
      }
      traj.push_back(std::move(psi));
    }
    return traj;
  }

  // rk4
  const std::size_t n_amp = psi0.amps.size();
  std::vector<cplx> y = psi0.amps, k1(n_amp), k2(n_amp), k3(n_amp), k4(n_amp),
                    tmp(n_amp);
  for (std::size_t n = 0;; ++n) {
    PureState psi;
    psi.time = static_cast<double>(n) * dtau;
    psi.amps = y;
    const double drift = std::abs(norm2(psi) - 1.0);
    if (drift > kNormDriftAbort)
      throw NumericalError("evolve_exact(rk4): norm drift " +
                           std::to_string(drift) + " at tau " +
                           std::to_string(psi.time));
    traj.push_back(std::move(psi));
    if (n == nsteps) break;

    schroedinger_rhs(modes, y, k1);
    for (std::size_t i = 0; i < n_amp; ++i) tmp[i] = y[i] + 0.5 * dtau * k1[i];
    schroedinger_rhs(modes, tmp, k2);
    for (std::size_t i = 0; i < n_amp; ++i) tmp[i] = y[i] + 0.5 * dtau * k2[i];
    schroedinger_rhs(modes, tmp, k3);
    for (std::size_t i = 0; i < n_amp; ++i) tmp[i] = y[i] + dtau * k3[i];
    schroedinger_rhs(modes, tmp, k4);
    for (std::size_t i = 0; i < n_amp; ++i)
      y[i] += dtau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return traj;
}

PureState to_interaction_picture(const PureState& psi, const ModeSet& modes) {
  require_modes(psi, modes);
  PureState out = psi;
  out.amps[1] *= std::exp(cplx(0.0, modes.omega0 * psi.time));
  for (std::size_t k = 1; k <= modes.count; ++k)
    out.amps[1 + k] *= std::exp(cplx(0.0, modes.omegas[k - 1] * psi.time));
  return out;
}

void chi_exact_into(const PureState& psi, const TruncatedBasis& basis,
                    ComplexMatrix& chi, Qubit* rho_s) {
  const std::size_t nb = basis.bath_dim();
  if (psi.num_modes() != basis.num_modes || chi.dim() != basis.dim())
    throw ConfigError("chi_exact_into: dimension mismatch");
  // u = bath components with the qubit down; c1 with the qubit up.
  const cplx* amps = psi.amps.data();
  const cplx c1 = amps[1];
  const double q = std::norm(c1);

  double u2 = std::norm(amps[0]);
  for (std::size_t k = 1; k < nb; ++k) u2 += std::norm(amps[1 + k]);
  const double a = u2;       // rho_s[0,0]
  const double d = q;        // rho_s[1,1]
  const cplx c = amps[0] * std::conj(c1);  // rho_s[0,1]
  if (rho_s) *rho_s = {cplx(a, 0.0), c, std::conj(c), cplx(d, 0.0)};

  auto u_at = [&](std::size_t b) { return b == 0 ? amps[0] : amps[1 + b]; };
  for (std::size_t b = 0; b < nb; ++b) {
    const cplx ub = u_at(b);
    cplx* row0 = chi.row(b);
    cplx* row1 = chi.row(nb + b);
    for (std::size_t bp = 0; bp < nb; ++bp) {
      const cplx rb = ub * std::conj(u_at(bp)) +
                      ((b == 0 && bp == 0) ? cplx(q, 0.0) : cplx{});
      const cplx sb00 = ub * std::conj(u_at(bp));
      const cplx sb01 = (bp == 0) ? ub * std::conj(c1) : cplx{};
      const cplx sb10 = (b == 0) ? c1 * std::conj(u_at(bp)) : cplx{};
      const cplx sb11 = (b == 0 && bp == 0) ? cplx(q, 0.0) : cplx{};
      row0[bp] = sb00 - a * rb;
      row0[nb + bp] = sb01 - c * rb;
      row1[bp] = sb10 - std::conj(c) * rb;
      row1[nb + bp] = sb11 - d * rb;
    }
  }
}

ReducedState reduced_and_chi(const PureState& psi, const ModeSet& modes,
                             const TruncatedBasis& basis,
                             bool interaction_picture) {
  require_modes(psi, modes);
  if (basis.num_modes != modes.count)
    throw ConfigError("reduced_and_chi: basis mismatch");
  const PureState st =
      interaction_picture ? to_interaction_picture(psi, modes) : psi;
  const std::size_t nb = basis.bath_dim();

  ReducedState out{ComplexMatrix(2), ComplexMatrix(nb),
                   ComplexMatrix(basis.dim()), ComplexMatrix(basis.dim())};
  // rho_sb = |psi><psi| embedded in the product basis.
  std::vector<cplx> flat(basis.dim());
  flat[basis.index(0, 0)] = st.amps[0];
  flat[basis.index(1, 0)] = st.amps[1];
  for (std::size_t k = 1; k <= modes.count; ++k)
    flat[basis.index(0, k)] = st.amps[1 + k];
  for (std::size_t r = 0; r < basis.dim(); ++r)
    for (std::size_t cidx = 0; cidx < basis.dim(); ++cidx)
      out.rho_sb(r, cidx) = flat[r] * std::conj(flat[cidx]);

  out.rho_s = ptrace_bath(out.rho_sb, basis);
  out.rho_b = ptrace_sys(out.rho_sb, basis);
  out.chi = out.rho_sb;
  out.chi -= tensor_sb(out.rho_s, out.rho_b, basis);
  return out;
}

double bath_trace_distance_from_vacuum(const PureState& psi) {
  const std::size_t m = psi.num_modes();
  // rho_B = u u^dag + q e0 e0^dag with u the qubit-down bath amplitudes.
  const cplx u0 = psi.amps[0];
  const double q = std::norm(psi.amps[1]);
  double r2 = 0.0;
  for (std::size_t k = 1; k <= m; ++k) r2 += std::norm(psi.amps[1 + k]);
  // On span{e0, y}: X = rho_B - e0 e0^dag restricted is
  //   [[|u0|^2 + q - 1, u0 r], [conj(u0) r, r^2]],  r = sqrt(r2).
  const double x00 = std::norm(u0) + q - 1.0;
  const double x11 = r2;
  const double off2 = std::norm(u0) * r2;
  const double tr = x00 + x11;
  const double det = x00 * x11 - off2;
  const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  const double l1 = 0.5 * tr + disc;
  const double l2 = 0.5 * tr - disc;
  return 0.5 * (std::abs(l1) + std::abs(l2));
}

}  // namespace corrsim
