#include <chrono>
#include <cmath>

#include "corrsim/errors.hpp"
#include "corrsim/mesolve.hpp"
#include "mesolve_detail.hpp"

namespace corrsim {

namespace {

struct Ull2Stage {
  Qubit k_rho{};
  ComplexMatrix k_bath;
  ComplexMatrix k_chi;

  explicit Ull2Stage(std::size_t nb) : k_bath(nb), k_chi(2 * nb) {}
};

}  // namespace

// Joint RK4 over (rho_S, rho_B, chi). The correlation derivative
//   dchi/dtau = -i [H~_I(tau), rho_S (x) rho_B]
// does not read chi, so stage values of chi never need materializing: the
// trace terms that feed drho_S and drho_B are linear in chi and are taken
// from the accumulator and the previous stage derivative separately.
MethodResult solve_ull2(const ModeSet& modes, const TruncatedBasis& basis,
                        const ComplexMatrix& rho_s0, double dtau,
                        double tau_final, const SolverOptions& opts) {
  if (basis.num_modes != modes.count)
    throw ConfigError("solve_ull2: basis mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  Qubit rho = detail::validated_initial_state(rho_s0, "ULL2");
  const std::size_t nsteps = detail::step_count(dtau, tau_final, "ULL2");

  MethodResult res;
  res.method = MethodId::ULL2;
  detail::Recorder rec{&res, opts.sample_stride ? opts.sample_stride : 1,
                       opts.observer ? &opts.observer : nullptr};

  const std::size_t nb = basis.bath_dim();
  const std::size_t dim = basis.dim();
  const cplx mi(0.0, -1.0);
  const cplx pi_(0.0, 1.0);

  ComplexMatrix rho_b = detail::vacuum_bath(nb);
  ComplexMatrix chi(dim);
  std::array<Ull2Stage, 4> k{Ull2Stage(nb), Ull2Stage(nb), Ull2Stage(nb),
                             Ull2Stage(nb)};
  ComplexMatrix bath_stage(nb), cb(nb);
  std::vector<cplx> wu(nb), wl(nb);

  const std::size_t nb2 = nb * nb;
  const std::size_t d2 = dim * dim;
  auto axpy_n = [](cplx* y, cplx a, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
  };

  auto eval_stage = [&](Ull2Stage& out, double tau_st, const Qubit& rho_st,
                        const ComplexMatrix& rho_b_st, double beta,
                        const ComplexMatrix* k_chi_prev) {
    const std::vector<cplx> v = coupling_phases(modes, tau_st);
    const Qubit h_s = qb::trace_b_weighted(v, v, rho_b_st);
    for (std::size_t b = 0; b < nb; ++b) {
      wu[b] = rho_st[2] * v[b];
      wl[b] = std::conj(rho_st[1]) * v[b];
    }
    qb::bath_coupling_comm(cb, 1.0, wu, wl, rho_b_st, false);

    out.k_chi.set_zero();
    qb::add_comm_product(out.k_chi, mi, v, v, rho_st, rho_b_st, false, false);
    qb::add_kron(out.k_chi, pi_, qcommutator(h_s, rho_st), rho_b_st);
    qb::add_kron(out.k_chi, pi_, rho_st, cb);

    out.k_rho = qscaled(mi, qcommutator(h_s, rho_st));
    Qubit tb = qb::trace_b_comm(v, v, chi);
    if (k_chi_prev) qaxpy(tb, beta, qb::trace_b_comm(v, v, *k_chi_prev));
    qaxpy(out.k_rho, mi, tb);

    qb::trace_s_comm(out.k_bath, mi, v, v, chi, false);
    if (k_chi_prev)
      qb::trace_s_comm(out.k_bath, mi * beta, v, v, *k_chi_prev, true);
    axpy_n(out.k_bath.data(), mi, cb.data(), nb2);
  };

  std::size_t herm_check_at = 0;
  for (std::size_t n = 0;; ++n) {
    const double tau = static_cast<double>(n) * dtau;
    detail::check_trace(rho, tau, "ULL2");
    if (n >= herm_check_at) {
      if (chi.hermiticity_defect() > 1e-8)
        throw NumericalError("ULL2: correlation Hermiticity drift at tau " +
                             std::to_string(tau));
      herm_check_at = n + 200;
    }
    rec.observe(n, tau, rho, &chi, nullptr, &rho_b);
    if (n == nsteps) break;

    const double h = dtau;
    eval_stage(k[0], tau, rho, rho_b, 0.0, nullptr);

    Qubit rho_st = rho;
    qaxpy(rho_st, 0.5 * h, k[0].k_rho);
    bath_stage = rho_b;
    axpy_n(bath_stage.data(), 0.5 * h, k[0].k_bath.data(), nb2);
    eval_stage(k[1], tau + 0.5 * h, rho_st, bath_stage, 0.5 * h, &k[0].k_chi);

    rho_st = rho;
    qaxpy(rho_st, 0.5 * h, k[1].k_rho);
    bath_stage = rho_b;
    axpy_n(bath_stage.data(), 0.5 * h, k[1].k_bath.data(), nb2);
    eval_stage(k[2], tau + 0.5 * h, rho_st, bath_stage, 0.5 * h, &k[1].k_chi);

    rho_st = rho;
    qaxpy(rho_st, h, k[2].k_rho);
    bath_stage = rho_b;
    axpy_n(bath_stage.data(), h, k[2].k_bath.data(), nb2);
    eval_stage(k[3], tau + h, rho_st, bath_stage, h, &k[2].k_chi);

    const double w1 = h / 6.0, w2 = h / 3.0;
    qaxpy(rho, w1, k[0].k_rho);
    qaxpy(rho, w2, k[1].k_rho);
    qaxpy(rho, w2, k[2].k_rho);
    qaxpy(rho, w1, k[3].k_rho);
    axpy_n(rho_b.data(), w1, k[0].k_bath.data(), nb2);
    axpy_n(rho_b.data(), w2, k[1].k_bath.data(), nb2);
    axpy_n(rho_b.data(), w2, k[2].k_bath.data(), nb2);
    axpy_n(rho_b.data(), w1, k[3].k_bath.data(), nb2);
    {
      cplx* c = chi.data();
      const cplx* c1 = k[0].k_chi.data();
      const cplx* c2 = k[1].k_chi.data();
      const cplx* c3 = k[2].k_chi.data();
      const cplx* c4 = k[3].k_chi.data();
      for (std::size_t i = 0; i < d2; ++i)
        c[i] += w1 * (c1[i] + c4[i]) + w2 * (c2[i] + c3[i]);
    }
  }
  res.neg_pop_any = rec.sticky_neg;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return res;
}

}  // namespace corrsim
