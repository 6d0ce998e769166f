#include <chrono>
#include <cmath>

#include "corrsim/errors.hpp"
#include "corrsim/mesolve.hpp"
#include "mesolve_detail.hpp"

namespace corrsim {

namespace {

// Scratch for one MLL derivative evaluation; reused across substeps.
struct MllWork {
  ComplexMatrix r0;  // vacuum bath state
  ComplexMatrix w;   // [H~(tau), rho (x) r0]
  ComplexMatrix cb;  // [h_B, r0]
  std::vector<cplx> wu, wl;

  explicit MllWork(std::size_t nb)
      : r0(detail::vacuum_bath(nb)), w(2 * nb), cb(nb), wu(nb), wl(nb) {}

  Qubit rhs(const ModeSet& modes, double tau, const Qubit& rho) {
    const std::vector<cplx> v = coupling_phases(modes, tau);
    // Drive term Tr_B[H_I rho_B(0)]; zero for the vacuum bath but computed.
    const Qubit h_s = qb::trace_b_weighted(v, v, r0);

    for (std::size_t b = 0; b < wu.size(); ++b) {
      wu[b] = rho[2] * v[b];             // Tr_S weight, upper part
      wl[b] = std::conj(rho[1]) * v[b];  // lower part
    }
    qb::bath_coupling_comm(cb, 1.0, wu, wl, r0, false);

    w.set_zero();
    qb::add_comm_product(w, 1.0, v, v, rho, r0, false, false);
    qb::add_kron(w, -1.0, qcommutator(h_s, rho), r0);
    qb::add_kron(w, -1.0, rho, cb);

    Qubit out = qscaled(cplx(0.0, -1.0), qcommutator(h_s, rho));
    qaxpy(out, -tau, qb::trace_b_comm(v, v, w));
    return out;
  }
};

}  // namespace

Qubit mll_rhs(const ModeSet& modes, double tau, const Qubit& rho) {
  MllWork work(modes.count + 1);
  return work.rhs(modes, tau, rho);
}

MethodResult solve_mll(const ModeSet& modes, const TruncatedBasis& basis,
                       const ComplexMatrix& rho_s0, double dtau,
                       double tau_final, const SolverOptions& opts) {
  if (basis.num_modes != modes.count)
    throw ConfigError("solve_mll: basis mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  Qubit rho = detail::validated_initial_state(rho_s0, "MLL");
  const std::size_t nsteps = detail::step_count(dtau, tau_final, "MLL");

  MethodResult res;
  res.method = MethodId::MLL;
  detail::Recorder rec{&res, opts.sample_stride ? opts.sample_stride : 1,
                       opts.observer ? &opts.observer : nullptr};
  MllWork work(basis.bath_dim());

  for (std::size_t n = 0;; ++n) {
    const double tau = static_cast<double>(n) * dtau;
    detail::check_trace(rho, tau, "MLL");
    rec.observe(n, tau, rho, nullptr, nullptr, nullptr);
    if (n == nsteps) break;

    const Qubit k1 = work.rhs(modes, tau, rho);
    Qubit y = rho;
    qaxpy(y, 0.5 * dtau, k1);
    const Qubit k2 = work.rhs(modes, tau + 0.5 * dtau, y);
    y = rho;
    qaxpy(y, 0.5 * dtau, k2);
    const Qubit k3 = work.rhs(modes, tau + 0.5 * dtau, y);
    y = rho;
    qaxpy(y, dtau, k3);
    const Qubit k4 = work.rhs(modes, tau + dtau, y);
    qaxpy(rho, dtau / 6.0, k1);
    qaxpy(rho, dtau / 3.0, k2);
    qaxpy(rho, dtau / 3.0, k3);
    qaxpy(rho, dtau / 6.0, k4);
  }
  res.neg_pop_any = rec.sticky_neg;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace corrsim
