#include "corrsim/unfold.hpp"

#include <cmath>

#include "corrsim/errors.hpp"

namespace corrsim {

namespace {

constexpr cplx kMinusI(0.0, -1.0);

ComplexMatrix vacuum_bath(std::size_t nb) {
  ComplexMatrix r(nb);
  r(0, 0) = 1.0;
  return r;
}

std::vector<cplx> tcl2_kernel_weights(const ModeSet& modes, double tau) {
  std::vector<cplx> w(modes.count + 1);
  for (std::size_t k = 1; k <= modes.count; ++k)
    w[k] = modes.coupling(k) * phi(modes, k, tau);
  return w;
}

}  // namespace

void chi_tcl2_into(ComplexMatrix& out, const Qubit& rho_tau,
                   const ModeSet& modes, double tau) {
  const std::size_t nb = modes.count + 1;
  const ComplexMatrix r0 = vacuum_bath(nb);
  const std::vector<cplx> w = tcl2_kernel_weights(modes, tau);
  out.set_zero();
  qb::add_comm_product(out, kMinusI, w, w, rho_tau, r0, true, true);
}

void chi_redfield_into(ComplexMatrix& out, const Qubit& rho_tau,
                       const ModeSet& modes, double tau, double b_width) {
  const std::size_t nb = modes.count + 1;
  const ComplexMatrix r0 = vacuum_bath(nb);
  const std::vector<cplx> w = redfield_K_weights(modes, tau, b_width);
  out.set_zero();
  qb::add_comm_product(out, kMinusI, w, w, rho_tau, r0, true, true);
}

void chi_cr_into(ComplexMatrix& out, const Qubit& rho_tau,
                 const ComplexMatrix& chi_r0, const ModeSet& modes, double tau,
                 double b_width) {
  chi_redfield_into(out, rho_tau, modes, tau, b_width);
  out -= chi_r0;
}

void chi_mll_into(ComplexMatrix& out, const Qubit& rho_tau,
                  const ComplexMatrix& rho_b0, const ModeSet& modes,
                  double tau) {
  const std::size_t nb = modes.count + 1;
  if (rho_b0.dim() != nb)
    throw ConfigError("chi_mll: bath state dimension mismatch");
  const std::vector<cplx> v = coupling_phases(modes, tau);
  const Qubit h_s = qb::trace_b_weighted(v, v, rho_b0);
  std::vector<cplx> wu(nb), wl(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    wu[b] = rho_tau[2] * v[b];
    wl[b] = std::conj(rho_tau[1]) * v[b];
  }
  ComplexMatrix cb(nb);
  qb::bath_coupling_comm(cb, 1.0, wu, wl, rho_b0, false);

  const cplx a = kMinusI * tau;
  out.set_zero();
  qb::add_comm_product(out, a, v, v, rho_tau, rho_b0, false, false);
  qb::add_kron(out, -a, qcommutator(h_s, rho_tau), rho_b0);
  qb::add_kron(out, -a, rho_tau, cb);
}

void chi_lindblad_sum_into(ComplexMatrix& out, const Qubit& rho_tau,
                           const ModeSet& modes, double tau, double b_width) {
  const std::size_t nb = modes.count + 1;
  const ComplexMatrix r0 = vacuum_bath(nb);
  const std::vector<cplx> w = redfield_K_weights(modes, tau, b_width);
  const std::vector<cplx> zero(nb, cplx{});
  out.set_zero();
  // chi(+w0) integrates the raising gap component, chi(-w0) the lowering
  // one; only the system-side partial-trace correction applies per gap.
  qb::add_comm_product(out, kMinusI, zero, w, rho_tau, r0, true, false);
  qb::add_comm_product(out, kMinusI, w, zero, rho_tau, r0, true, false);
}

CorrelationOp chi_tcl2(const Qubit& rho_tau, const ModeSet& modes,
                       const TruncatedBasis& basis, double tau) {
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::TCL2, tau, {}};
  chi_tcl2_into(op.matrix, rho_tau, modes, tau);
  return op;
}

CorrelationOp chi_redfield(const Qubit& rho_tau, const ModeSet& modes,
                           const TruncatedBasis& basis, double tau,
                           double b_width) {
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::REDFIELD, tau, {}};
  chi_redfield_into(op.matrix, rho_tau, modes, tau, b_width);
  return op;
}

CorrelationOp chi_cr(const Qubit& rho_tau, const Qubit& rho_0,
                     const ModeSet& modes, const TruncatedBasis& basis,
                     double tau, double b_width) {
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::CR, tau, {}};
  ComplexMatrix chi_r0(basis.dim());
  chi_redfield_into(chi_r0, rho_0, modes, 0.0, b_width);
  chi_cr_into(op.matrix, rho_tau, chi_r0, modes, tau, b_width);
  return op;
}

CorrelationOp chi_mll(const Qubit& rho_tau, const ComplexMatrix& rho_b0,
                      const ModeSet& modes, const TruncatedBasis& basis,
                      double tau) {
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::MLL, tau, {}};
  chi_mll_into(op.matrix, rho_tau, rho_b0, modes, tau);
  return op;
}

CorrelationOp chi_lindblad_set(const Qubit& rho_tau, const ModeSet& modes,
                               const TruncatedBasis& basis, double tau,
                               double b_width) {
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::LINDBLAD, tau, {}};
  const std::size_t nb = basis.bath_dim();
  const ComplexMatrix r0 = vacuum_bath(nb);
  const std::vector<cplx> w = redfield_K_weights(modes, tau, b_width);
  const std::vector<cplx> zero(nb, cplx{});
  for (int gap : {+1, -1}) {
    ComplexMatrix part(basis.dim());
    // inner operator is the time integral of the opposite gap component
    const std::vector<cplx>& up = gap > 0 ? zero : w;
    const std::vector<cplx>& lo = gap > 0 ? w : zero;
    qb::add_comm_product(part, kMinusI, up, lo, rho_tau, r0, true, false);
    op.matrix += part;
    op.gap_set.emplace(gap, std::move(part));
  }
  return op;
}

CorrelationOp chi_nz2(std::span<const Qubit> history, double dtau,
                      const ModeSet& modes, const TruncatedBasis& basis) {
  if (history.empty()) throw ConfigError("chi_nz2: empty history");
  const std::size_t nb = basis.bath_dim();
  const ComplexMatrix r0 = vacuum_bath(nb);
  CorrelationOp op{ComplexMatrix(basis.dim()), MethodId::NZ2,
                   dtau * static_cast<double>(history.size() - 1), {}};
  if (history.size() == 1) return op;

  // Bath-side correction term must vanish for the vacuum bath state; it is
  // evaluated and checked at every node rather than assumed.
  ComplexMatrix product(basis.dim());
  for (std::size_t n = 0; n < history.size(); ++n) {
    const double s = dtau * static_cast<double>(n);
    const std::vector<cplx> v = coupling_phases(modes, s);
    const bool edge = (n == 0 || n + 1 == history.size());
    const double weight = edge ? 0.5 * dtau : dtau;

    product.set_zero();
    qb::add_kron(product, 1.0, history[n], r0);
    if (qfrobenius(qb::trace_b_comm(v, v, product)) > 1e-12)
      throw NumericalError("chi_nz2: bath-side trace term is not vanishing");

    qb::add_comm_product(op.matrix, kMinusI * weight, v, v, history[n], r0,
                         true, true);
  }
  return op;
}

double unfold_consistency(MethodId /*method*/, double tau,
                          const ComplexMatrix& chi, const Qubit& rho_s,
                          const ComplexMatrix& rho_b_eff, const ModeSet& modes,
                          const TruncatedBasis& basis,
                          const Qubit& method_rhs) {
  if (chi.dim() != basis.dim() || rho_b_eff.dim() != basis.bath_dim())
    throw ConfigError("unfold_consistency: dimension mismatch");
  const std::vector<cplx> v = coupling_phases(modes, tau);
  const Qubit h_s = qb::trace_b_weighted(v, v, rho_b_eff);
  Qubit universal = qscaled(kMinusI, qcommutator(h_s, rho_s));
  qaxpy(universal, kMinusI, qb::trace_b_comm(v, v, chi));

  Qubit diff = method_rhs;
  qaxpy(diff, -1.0, universal);
  return qfrobenius(diff);
}

}  // namespace corrsim
