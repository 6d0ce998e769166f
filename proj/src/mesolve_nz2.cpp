#include <chrono>
#include <cmath>

#include "corrsim/errors.hpp"
#include "corrsim/mesolve.hpp"
#include "mesolve_detail.hpp"

namespace corrsim {

// Integro-differential scheme: the memory operator
//   I(tau) = int_0^tau ds [H_I(s), rho_S(s) (x) rho_B(0)]
// is a running trapezoid accumulator; the outer equation
//   drho/dtau = -Tr_B[H_I(tau), I(tau)]
// advances with Heun so both halves stay second order. The correlation
// accumulator integrates the partial-trace-corrected integrand on the same
// grid with the same rule.
MethodResult solve_nz2(const ModeSet& modes, const TruncatedBasis& basis,
                       const ComplexMatrix& rho_s0, double dtau,
                       double tau_final, const SolverOptions& opts) {
  if (basis.num_modes != modes.count)
    throw ConfigError("solve_nz2: basis mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  Qubit rho = detail::validated_initial_state(rho_s0, "NZ2");
  const std::size_t nsteps = detail::step_count(dtau, tau_final, "NZ2");

  MethodResult res;
  res.method = MethodId::NZ2;
  detail::Recorder rec{&res, opts.sample_stride ? opts.sample_stride : 1,
                       opts.observer ? &opts.observer : nullptr};

  const std::size_t nb = basis.bath_dim();
  const std::size_t dim = basis.dim();
  const ComplexMatrix r0 = detail::vacuum_bath(nb);
  const cplx mi(0.0, -1.0);

  ComplexMatrix memory(dim), chi(dim);
  ComplexMatrix g_cur(dim), g_next(dim), f_cur(dim), f_next(dim), i_pred(dim);

  std::vector<cplx> v = coupling_phases(modes, 0.0);
  qb::add_comm_product(g_cur, 1.0, v, v, rho, r0, false, false);
  qb::add_comm_product(f_cur, mi, v, v, rho, r0, true, true);

  const std::size_t n_entries = dim * dim;
  auto axpy = [n_entries](ComplexMatrix& y, double a, const ComplexMatrix& x) {
    cplx* yd = y.data();
    const cplx* xd = x.data();
    for (std::size_t i = 0; i < n_entries; ++i) yd[i] += a * xd[i];
  };

  for (std::size_t n = 0;; ++n) {
    const double tau = static_cast<double>(n) * dtau;
    detail::check_trace(rho, tau, "NZ2");
    rec.observe(n, tau, rho, &chi, &memory, nullptr);
    if (n == nsteps) break;

    const double tau1 = tau + dtau;
    const std::vector<cplx> v1 = coupling_phases(modes, tau1);

    Qubit f_n = qscaled(-1.0, qb::trace_b_comm(v, v, memory));
    Qubit rho_pred = rho;
    qaxpy(rho_pred, dtau, f_n);

    g_next.set_zero();
    qb::add_comm_product(g_next, 1.0, v1, v1, rho_pred, r0, false, false);
    i_pred = memory;
    axpy(i_pred, 0.5 * dtau, g_cur);
    axpy(i_pred, 0.5 * dtau, g_next);
    const Qubit f_p = qscaled(-1.0, qb::trace_b_comm(v1, v1, i_pred));

    qaxpy(rho, 0.5 * dtau, f_n);
    qaxpy(rho, 0.5 * dtau, f_p);

    // Re-evaluate the node integrands with the corrected state.
    g_next.set_zero();
    qb::add_comm_product(g_next, 1.0, v1, v1, rho, r0, false, false);
    f_next.set_zero();
    qb::add_comm_product(f_next, mi, v1, v1, rho, r0, true, true);
    axpy(memory, 0.5 * dtau, g_cur);
    axpy(memory, 0.5 * dtau, g_next);
    axpy(chi, 0.5 * dtau, f_cur);
    axpy(chi, 0.5 * dtau, f_next);

    std::swap(g_cur, g_next);
    std::swap(f_cur, f_next);
    v = v1;
  }
  res.neg_pop_any = rec.sticky_neg;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace corrsim
