#pragma once

#include <array>
#include <cmath>
#include <span>

#include "corrsim/opalg.hpp"

namespace corrsim {

// Row-major 2x2 system matrix: {a00, a01, a10, a11}.
using Qubit = std::array<cplx, 4>;

inline Qubit qubit_from(const ComplexMatrix& m) {
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}
ComplexMatrix to_matrix(const Qubit& q);
inline cplx qtrace(const Qubit& q) { return q[0] + q[3]; }
inline Qubit qcommutator(const Qubit& x, const Qubit& y) {
  return {x[1] * y[2] - y[1] * x[2],
          x[0] * y[1] + x[1] * y[3] - y[0] * x[1] - y[1] * x[3],
          x[2] * y[0] + x[3] * y[2] - y[2] * x[0] - y[3] * x[2],
          x[2] * y[1] - y[2] * x[1]};
}
inline void qaxpy(Qubit& y, cplx a, const Qubit& x) {
  for (int i = 0; i < 4; ++i) y[i] += a * x[i];
}
inline Qubit qscaled(cplx a, const Qubit& x) {
  return {a * x[0], a * x[1], a * x[2], a * x[3]};
}
inline double qhermiticity_defect(const Qubit& q) {
  const double d0 = std::abs(q[0] - std::conj(q[0]));
  const double d1 = std::abs(q[1] - std::conj(q[2]));
  const double d3 = std::abs(q[3] - std::conj(q[3]));
  return std::max({d0, d1, d3});
}
inline double qmin_eigenvalue(const Qubit& q) {
  const double a = q[0].real();
  const double d = q[3].real();
  const double h = 0.5 * (a - d);
  return 0.5 * (a + d) - std::sqrt(h * h + std::norm(q[1]));
}
double qfrobenius(const Qubit& q);

// Operators whose only couplings run between the qubit-flip strips, written
// over bath blocks as H = [[0, U],[L, 0]] with U = up * e0^T (column 0) and
// L = e0 * lo^dag (row 0). The interaction Hamiltonian, its gap components,
// and every memory-kernel operator in this model have this shape; products
// against system (x) bath states then reduce to outer products of bath
// vectors, which is what the kernels below exploit.
namespace qb {

using VecView = std::span<const cplx>;

// out += alpha * [H_{up,lo}, rho (x) R].
// subtract_trs: remove I_S/2 (x) Tr_S[..]; subtract_trb: remove
// Tr_B[..] (x) I_B/nb. out must be square of dim 2*R.dim().
void add_comm_product(ComplexMatrix& out, cplx alpha, VecView up, VecView lo,
                      const Qubit& rho, const ComplexMatrix& r,
                      bool subtract_trs, bool subtract_trb);

// Tr_B [H_{up,lo}, X] for a full-dimension X.
Qubit trace_b_comm(VecView up, VecView lo, const ComplexMatrix& x);

// out (+)= alpha * Tr_S [H_{up,lo}, X].
void trace_s_comm(ComplexMatrix& out, cplx alpha, VecView up, VecView lo,
                  const ComplexMatrix& x, bool accumulate);

// Tr_B [H_{up,lo} (I_S (x) R)]  (a 2x2 with zero diagonal).
Qubit trace_b_weighted(VecView up, VecView lo, const ComplexMatrix& r);

// out (+)= alpha * [wu e0^T + e0 wl^dag, R]  (bath-space commutator with a
// coupling-shaped bath operator).
void bath_coupling_comm(ComplexMatrix& out, cplx alpha, VecView wu, VecView wl,
                        const ComplexMatrix& r, bool accumulate);

// out += alpha * q (x) X.
void add_kron(ComplexMatrix& out, cplx alpha, const Qubit& q,
              const ComplexMatrix& x);

}  // namespace qb
}  // namespace corrsim
