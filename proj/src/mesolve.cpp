#include "corrsim/mesolve.hpp"

#include <chrono>
#include <cmath>

#include "corrsim/errors.hpp"
#include "mesolve_detail.hpp"

namespace corrsim {

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::ULL2: return "ULL2";
    case MethodId::MLL: return "MLL";
    case MethodId::NZ2: return "NZ2";
    case MethodId::TCL2: return "TCL2";
    case MethodId::REDFIELD: return "REDFIELD";
    case MethodId::CR: return "CR";
    case MethodId::LINDBLAD: return "LINDBLAD";
  }
  return "?";
}

std::optional<MethodId> method_from_string(std::string_view s) {
  for (MethodId m : kAllMethods)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

namespace detail {

Qubit validated_initial_state(const ComplexMatrix& rho_s0, const char* who) {
  if (rho_s0.dim() != 2)
    throw ConfigError(std::string(who) + ": initial system state must be 2x2");
  if (rho_s0.hermiticity_defect() > 1e-10)
    throw ConfigError(std::string(who) + ": initial state not Hermitian");
  if (std::abs(rho_s0.trace() - 1.0) > 1e-9)
    throw ConfigError(std::string(who) + ": initial state trace != 1");
  return qubit_from(rho_s0);
}

std::size_t step_count(double dtau, double tau_final, const char* who) {
  if (dtau <= 0.0) throw ConfigError(std::string(who) + ": dtau <= 0");
  if (tau_final < dtau)
    throw ConfigError(std::string(who) + ": tau_final < dtau");
  return static_cast<std::size_t>(std::llround(tau_final / dtau));
}

void check_trace(const Qubit& rho, double tau, const char* who) {
  if (std::abs(qtrace(rho) - cplx(1.0, 0.0)) > 1e-6)
    throw NumericalError(std::string(who) + ": trace drift at tau " +
                         std::to_string(tau));
}

void Recorder::observe(std::size_t n, double tau, const Qubit& rho,
                       const ComplexMatrix* chi, const ComplexMatrix* memory,
                       const ComplexMatrix* rho_b) {
  if (qmin_eigenvalue(rho) < -1e-6) sticky_neg = true;
  if (n % stride == 0) {
    res->times.push_back(tau);
    res->rho11.push_back(rho[3].real());
    res->coherence.push_back(std::abs(rho[1]));
    res->neg_pop_flag.push_back(sticky_neg ? 1 : 0);
  }
  if (observer) {
    StepView view;
    view.step = n;
    view.tau = tau;
    view.rho_s = rho;
    view.chi = chi;
    view.memory = memory;
    view.rho_b = rho_b;
    (*observer)(view);
  }
}

ComplexMatrix vacuum_bath(std::size_t nb) {
  ComplexMatrix r(nb);
  r(0, 0) = 1.0;
  return r;
}

}  // namespace detail

Qubit lindblad_form(double gamma, double epsilon, const Qubit& rho) {
  const cplx c = rho[1], cc = rho[2], d = rho[3];
  return {2.0 * gamma * d, cplx(0.0, epsilon) * c - gamma * c,
          cplx(0.0, -epsilon) * cc - gamma * cc, -2.0 * gamma * d};
}

Qubit tcl2_rhs(const ModeSet& modes, double tau, const Qubit& rho) {
  const RatePair r = tcl2_rates(modes, tau);
  return lindblad_form(r.gamma, r.epsilon, rho);
}

Qubit redfield_rhs(const ModeSet& modes, double b_width, const Qubit& rho) {
  const RatePair r = redfield_rates(modes, b_width);
  return lindblad_form(r.gamma, r.epsilon, rho);
}

Qubit cr_rhs(const ModeSet& modes, double tau, double b_width,
             const Qubit& rho, const Qubit& rho0) {
  const RatePair r = redfield_rates(modes, b_width);
  const RatePair rc = cr_rates(modes, tau, b_width);
  Qubit out = lindblad_form(r.gamma, r.epsilon, rho);
  qaxpy(out, -1.0, lindblad_form(rc.gamma, rc.epsilon, rho0));
  return out;
}

Qubit nz2_rhs(const ModeSet& modes, double tau, const ComplexMatrix& memory) {
  const std::vector<cplx> v = coupling_phases(modes, tau);
  Qubit t = qb::trace_b_comm(v, v, memory);
  return qscaled(-1.0, t);
}

Qubit ull2_rhs_sys(const ModeSet& modes, double tau, const Qubit& rho,
                   const ComplexMatrix& rho_b, const ComplexMatrix& chi) {
  const std::vector<cplx> v = coupling_phases(modes, tau);
  const Qubit h_s = qb::trace_b_weighted(v, v, rho_b);
  Qubit out = qscaled(cplx(0.0, -1.0), qcommutator(h_s, rho));
  qaxpy(out, cplx(0.0, -1.0), qb::trace_b_comm(v, v, chi));
  return out;
}

namespace {

// Fixed-step RK4 over a 2x2 time-local equation.
template <typename Rhs>
MethodResult run_local(MethodId id, const ComplexMatrix& rho_s0, double dtau,
                       double tau_final, const SolverOptions& opts, Rhs rhs) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string name = to_string(id);
  Qubit rho = detail::validated_initial_state(rho_s0, name.c_str());
  const std::size_t nsteps = detail::step_count(dtau, tau_final, name.c_str());

  MethodResult res;
  res.method = id;
  detail::Recorder rec{&res, opts.sample_stride ? opts.sample_stride : 1,
                       opts.observer ? &opts.observer : nullptr};

  for (std::size_t n = 0;; ++n) {
    const double tau = static_cast<double>(n) * dtau;
    detail::check_trace(rho, tau, name.c_str());
    rec.observe(n, tau, rho, nullptr, nullptr, nullptr);
    if (n == nsteps) break;

    const Qubit k1 = rhs(tau, rho);
    Qubit y = rho;
    qaxpy(y, 0.5 * dtau, k1);
    const Qubit k2 = rhs(tau + 0.5 * dtau, y);
    y = rho;
    qaxpy(y, 0.5 * dtau, k2);
    const Qubit k3 = rhs(tau + 0.5 * dtau, y);
    y = rho;
    qaxpy(y, dtau, k3);
    const Qubit k4 = rhs(tau + dtau, y);
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

}  // namespace

MethodResult solve_tcl2(const ModeSet& modes, const ComplexMatrix& rho_s0,
                        double dtau, double tau_final,
                        const SolverOptions& opts) {
  return run_local(MethodId::TCL2, rho_s0, dtau, tau_final, opts,
                   [&modes](double tau, const Qubit& rho) {
                     return tcl2_rhs(modes, tau, rho);
                   });
}

MethodResult solve_redfield(const ModeSet& modes, const ComplexMatrix& rho_s0,
                            double dtau, double tau_final, double b_width,
                            const SolverOptions& opts) {
  const RatePair r = redfield_rates(modes, b_width);
  return run_local(MethodId::REDFIELD, rho_s0, dtau, tau_final, opts,
                   [r](double, const Qubit& rho) {
                     return lindblad_form(r.gamma, r.epsilon, rho);
                   });
}

MethodResult solve_cr(const ModeSet& modes, const ComplexMatrix& rho_s0,
                      double dtau, double tau_final, double b_width,
                      const SolverOptions& opts) {
  const RatePair r = redfield_rates(modes, b_width);
  const Qubit rho0 = detail::validated_initial_state(rho_s0, "CR");
  return run_local(MethodId::CR, rho_s0, dtau, tau_final, opts,
                   [&modes, r, rho0, b_width](double tau, const Qubit& rho) {
                     const RatePair rc = cr_rates(modes, tau, b_width);
                     Qubit out = lindblad_form(r.gamma, r.epsilon, rho);
                     qaxpy(out, -1.0,
                           lindblad_form(rc.gamma, rc.epsilon, rho0));
                     return out;
                   });
}

LindbladGenerator build_lindblad_generator(const ModeSet& modes,
                                           const TruncatedBasis& basis,
                                           double b_width, double tau) {
  if (basis.num_modes != modes.count)
    throw ConfigError("build_lindblad_generator: basis mismatch");
  const std::size_t nb = basis.bath_dim();
  const ComplexMatrix r0 = detail::vacuum_bath(nb);
  const std::vector<cplx> kw = redfield_K_weights(modes, tau, b_width);
  const std::vector<cplx> zero(nb, cplx{});

  LindbladGenerator gen;
  ComplexMatrix w(basis.dim());
  for (int i = 0; i < 4; ++i) {
    Qubit unit{};
    unit[i] = 1.0;
    Qubit col{};
    for (int gap : {+1, -1}) {
      std::vector<cplx> up_o, lo_o;
      gap_component_weights(modes, gap, tau, up_o, lo_o);
      // inner integral pairs the opposite gap component of the coupling
      const std::vector<cplx>& up_i = gap > 0 ? zero : kw;
      const std::vector<cplx>& lo_i = gap > 0 ? kw : zero;
      w.set_zero();
      qb::add_comm_product(w, 1.0, up_i, lo_i, unit, r0, false, false);
      qaxpy(col, -1.0, qb::trace_b_comm(up_o, lo_o, w));
    }
    gen.columns[i] = col;
  }
  return gen;
}

MethodResult solve_lindblad(const ModeSet& modes, const TruncatedBasis& basis,
                            const ComplexMatrix& rho_s0, double dtau,
                            double tau_final, double b_width,
                            const SolverOptions& opts) {
  const LindbladGenerator gen =
      build_lindblad_generator(modes, basis, b_width);
  MethodResult res = run_local(
      MethodId::LINDBLAD, rho_s0, dtau, tau_final, opts,
      [&gen](double, const Qubit& rho) { return gen.apply(rho); });
  return res;
}

MethodResult solve(MethodId m, const ModeSet& modes,
                   const TruncatedBasis& basis, const ComplexMatrix& rho_s0,
                   double dtau, double tau_final, double b_width,
                   const SolverOptions& opts) {
  switch (m) {
    case MethodId::ULL2:
      return solve_ull2(modes, basis, rho_s0, dtau, tau_final, opts);
    case MethodId::MLL:
      return solve_mll(modes, basis, rho_s0, dtau, tau_final, opts);
    case MethodId::NZ2:
      return solve_nz2(modes, basis, rho_s0, dtau, tau_final, opts);
    case MethodId::TCL2:
      return solve_tcl2(modes, rho_s0, dtau, tau_final, opts);
    case MethodId::REDFIELD:
      return solve_redfield(modes, rho_s0, dtau, tau_final, b_width, opts);
    case MethodId::CR:
      return solve_cr(modes, rho_s0, dtau, tau_final, b_width, opts);
    case MethodId::LINDBLAD:
      return solve_lindblad(modes, basis, rho_s0, dtau, tau_final, b_width,
                            opts);
  }
  throw ConfigError("solve: unknown method");
}

}  // namespace corrsim
