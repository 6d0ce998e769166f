#include "corrsim/block_ops.hpp"

#include <cmath>
#include <vector>

#include "corrsim/errors.hpp"

namespace corrsim {

ComplexMatrix to_matrix(const Qubit& q) {
  ComplexMatrix m(2);
  m(0, 0) = q[0];
  m(0, 1) = q[1];
  m(1, 0) = q[2];
  m(1, 1) = q[3];
  return m;
}

double qfrobenius(const Qubit& q) {
  double acc = 0.0;
  for (const cplx& z : q) acc += std::norm(z);
  return std::sqrt(acc);
}

namespace qb {

namespace {

void require_dims(const ComplexMatrix& out, VecView up, VecView lo,
                  const ComplexMatrix& r, const char* what) {
  const std::size_t nb = r.dim();
  if (up.size() != nb || lo.size() != nb || out.dim() != 2 * nb)
    throw ConfigError(std::string(what) + ": inconsistent block dimensions");
}

}  // namespace

void add_comm_product(ComplexMatrix& out, cplx alpha, VecView up, VecView lo,
                      const Qubit& rho, const ComplexMatrix& r,
                      bool subtract_trs, bool subtract_trb) {
  require_dims(out, up, lo, r, "add_comm_product");
  const std::size_t nb = r.dim();
  const cplx a = rho[0], c = rho[1], cc = rho[2], d = rho[3];

  // Bath vectors the commutator blocks are outer products of.
  std::vector<cplx> r_up(nb), lo_r(nb), lo_conj(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    cplx acc{};
    const cplx* row = r.row(b);
    for (std::size_t m = 0; m < nb; ++m) acc += row[m] * up[m];
    r_up[b] = acc;  // (R up)[b]
    lo_conj[b] = std::conj(lo[b]);
  }
  for (std::size_t bp = 0; bp < nb; ++bp) {
    cplx acc{};
    for (std::size_t m = 0; m < nb; ++m) acc += lo_conj[m] * r(m, bp);
    lo_r[bp] = acc;  // (lo^dag R)[bp]
  }
  const cplx* r0 = r.row(0);  // R[0,:]

  // Block contents of C = [H, rho (x) R] over the four outer products
  //   O1 = outer(up, r0)    O2 = outer(rc0, conj(lo))
  //   O3 = outer(e0, lo_r)  O4 = outer(r_up, e0):
  //   C00 = cc O1 - c O2,  C01 = d O1 - a O4,
  //   C10 = a O3 - d O2,   C11 = c O3 - cc O4.
  // Tr_S C = C00 + C11; removing I_S/2 (x) Tr_S C reshuffles the block
  // coefficients, so the whole corrected object remains a sum of the same
  // outer products. O3/O4 touch only the b = 0 row / bp = 0 column; the
  // dense double loop below handles O1/O2 and strip passes do the rest.
  const cplx a00_1 = alpha * (subtract_trs ? 0.5 * cc : cc);
  const cplx a00_2 = alpha * (subtract_trs ? -0.5 * c : -c);
  const cplx a11_1 = alpha * (subtract_trs ? -0.5 * cc : cplx{});
  const cplx a11_2 = alpha * (subtract_trs ? 0.5 * c : cplx{});
  const cplx a01_1 = alpha * d;
  const cplx a10_2 = alpha * -d;
  const cplx a00_3 = alpha * (subtract_trs ? -0.5 * c : cplx{});
  const cplx a00_4 = alpha * (subtract_trs ? 0.5 * cc : cplx{});
  const cplx a11_3 = alpha * (subtract_trs ? 0.5 * c : c);
  const cplx a11_4 = alpha * (subtract_trs ? -0.5 * cc : -cc);
  const cplx a10_3 = alpha * a;
  const cplx a01_4 = alpha * -a;

  for (std::size_t b = 0; b < nb; ++b) {
    const cplx rb0 = r(b, 0);  // rc0[b]
    cplx* row0 = out.row(b);       // qubit-row 0
    cplx* row1 = out.row(nb + b);  // qubit-row 1
    const cplx u1_00 = a00_1 * up[b], u2_00 = a00_2 * rb0;
    const cplx u1_01 = a01_1 * up[b];
    const cplx u2_10 = a10_2 * rb0;
    const cplx u1_11 = a11_1 * up[b], u2_11 = a11_2 * rb0;
    for (std::size_t bp = 0; bp < nb; ++bp) {
      const cplx o1 = r0[bp];
      const cplx o2 = lo_conj[bp];
      row0[bp] += u1_00 * o1 + u2_00 * o2;
      row0[nb + bp] += u1_01 * o1;
      row1[bp] += u2_10 * o2;
      row1[nb + bp] += u1_11 * o1 + u2_11 * o2;
    }
  }
  {
    cplx* row_00 = out.row(0);   // (0, 0) bath row, O3 strips
    cplx* row_10 = out.row(nb);  // (1, 0) bath row
    for (std::size_t bp = 0; bp < nb; ++bp) {
      row_00[bp] += a00_3 * lo_r[bp];
      row_10[bp] += a10_3 * lo_r[bp];
      row_10[nb + bp] += a11_3 * lo_r[bp];
    }
    for (std::size_t b = 0; b < nb; ++b) {  // O4 strips (bp = 0 columns)
      out(b, 0) += a00_4 * r_up[b];
      out(b, nb) += a01_4 * r_up[b];
      out(nb + b, nb) += a11_4 * r_up[b];
    }
  }

  if (subtract_trb) {
    // s1 = up . R[0,:], s2 = lo^dag . R[:,0]
    cplx s1{};
    for (std::size_t m = 0; m < nb; ++m) s1 += up[m] * r0[m];
    const cplx s2 = lo_r[0];
    const cplx tb00 = cc * s1 - c * s2;
    const cplx tb01 = (d - a) * s1;
    const cplx tb10 = (a - d) * s2;
    const cplx tb11 = c * s2 - cc * s1;
    const double inb = 1.0 / static_cast<double>(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      out(b, b) -= alpha * tb00 * inb;
      out(b, nb + b) -= alpha * tb01 * inb;
      out(nb + b, b) -= alpha * tb10 * inb;
      out(nb + b, nb + b) -= alpha * tb11 * inb;
    }
  }
}

Qubit trace_b_comm(VecView up, VecView lo, const ComplexMatrix& x) {
  const std::size_t nb = up.size();
  if (lo.size() != nb || x.dim() != 2 * nb)
    throw ConfigError("trace_b_comm: inconsistent block dimensions");
  // Tr_B[HX]: [0,0] sum_b up[b] X[(1,0),(0,b)]   [0,1] sum_b up[b] X[(1,0),(1,b)]
  //           [1,0] sum_m conj(lo[m]) X[(0,m),(0,0)]
  //           [1,1] sum_m conj(lo[m]) X[(0,m),(1,0)]
  // Tr_B[XH]: [0,0] sum_b conj(lo[b]) X[(0,b),(1,0)]
  //           [0,1] sum_j up[j] X[(0,0),(0,j)]
  //           [1,0] sum_b conj(lo[b]) X[(1,b),(1,0)]
  //           [1,1] sum_j up[j] X[(1,0),(0,j)]
  cplx hx00{}, hx01{}, hx10{}, hx11{}, xh00{}, xh01{}, xh10{}, xh11{};
  const cplx* xrow_10 = x.row(nb);  // row of flat index (1,0)
  const cplx* xrow_00 = x.row(0);
  for (std::size_t b = 0; b < nb; ++b) {
    hx00 += up[b] * xrow_10[b];
    hx01 += up[b] * xrow_10[nb + b];
    hx10 += std::conj(lo[b]) * x(b, 0);
    hx11 += std::conj(lo[b]) * x(b, nb);
    xh00 += std::conj(lo[b]) * x(b, nb);
    xh01 += up[b] * xrow_00[b];
    xh10 += std::conj(lo[b]) * x(nb + b, nb);
    xh11 += up[b] * xrow_10[b];
  }
  return {hx00 - xh00, hx01 - xh01, hx10 - xh10, hx11 - xh11};
}

void trace_s_comm(ComplexMatrix& out, cplx alpha, VecView up, VecView lo,
                  const ComplexMatrix& x, bool accumulate) {
  const std::size_t nb = up.size();
  if (lo.size() != nb || x.dim() != 2 * nb || out.dim() != nb)
    throw ConfigError("trace_s_comm: inconsistent block dimensions");
  if (!accumulate) out.set_zero();
  // Tr_S[H,X] = outer(up, X10[0,:]) + outer(e0, lo^dag X01)
  //           - outer(X01[:,0], conj(lo)) - outer(X10 up, e0)
  std::vector<cplx> lo_x01(nb), x10_up(nb);
  for (std::size_t bp = 0; bp < nb; ++bp) {
    cplx acc{};
    for (std::size_t m = 0; m < nb; ++m)
      acc += std::conj(lo[m]) * x(m, nb + bp);
    lo_x01[bp] = acc;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    cplx acc{};
    const cplx* row = x.row(nb + b);
    for (std::size_t j = 0; j < nb; ++j) acc += row[j] * up[j];
    x10_up[b] = acc;
  }
  const cplx* x10_row0 = x.row(nb);  // X10[0,:] = X[(1,0),(0,:)]
  for (std::size_t b = 0; b < nb; ++b) {
    cplx* orow = out.row(b);
    const cplx x01_b0 = x(b, nb);  // X01[:,0]
    for (std::size_t bp = 0; bp < nb; ++bp) {
      cplx v = up[b] * x10_row0[bp] - x01_b0 * std::conj(lo[bp]);
      if (b == 0) v += lo_x01[bp];
      if (bp == 0) v -= x10_up[b];
      orow[bp] += alpha * v;
    }
  }
}

Qubit trace_b_weighted(VecView up, VecView lo, const ComplexMatrix& r) {
  const std::size_t nb = r.dim();
  if (up.size() != nb || lo.size() != nb)
    throw ConfigError("trace_b_weighted: inconsistent block dimensions");
  cplx t01{}, t10{};
  const cplx* r0 = r.row(0);
  for (std::size_t b = 0; b < nb; ++b) {
    t01 += up[b] * r0[b];
    t10 += std::conj(lo[b]) * r(b, 0);
  }
  return {cplx{}, t01, t10, cplx{}};
}

void bath_coupling_comm(ComplexMatrix& out, cplx alpha, VecView wu, VecView wl,
                        const ComplexMatrix& r, bool accumulate) {
  const std::size_t nb = r.dim();
  if (wu.size() != nb || wl.size() != nb || out.dim() != nb)
    throw ConfigError("bath_coupling_comm: inconsistent block dimensions");
  if (!accumulate) out.set_zero();
  // [wu e0^T + e0 wl^dag, R] = outer(wu, r0) + outer(e0, wl^dag R)
  //                          - outer(R wu, e0) - outer(rc0, conj(wl))
  std::vector<cplx> wl_r(nb), r_wu(nb);
  for (std::size_t bp = 0; bp < nb; ++bp) {
    cplx acc{};
    for (std::size_t m = 0; m < nb; ++m) acc += std::conj(wl[m]) * r(m, bp);
    wl_r[bp] = acc;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    cplx acc{};
    const cplx* row = r.row(b);
    for (std::size_t m = 0; m < nb; ++m) acc += row[m] * wu[m];
    r_wu[b] = acc;
  }
  const cplx* r0 = r.row(0);
  for (std::size_t b = 0; b < nb; ++b) {
    cplx* orow = out.row(b);
    const cplx rb0 = r(b, 0);
    for (std::size_t bp = 0; bp < nb; ++bp) {
      cplx v = wu[b] * r0[bp] - rb0 * std::conj(wl[bp]);
      if (b == 0) v += wl_r[bp];
      if (bp == 0) v -= r_wu[b];
      orow[bp] += alpha * v;
    }
  }
}

void add_kron(ComplexMatrix& out, cplx alpha, const Qubit& q,
              const ComplexMatrix& x) {
  const std::size_t nb = x.dim();
  if (out.dim() != 2 * nb)
    throw ConfigError("add_kron: inconsistent block dimensions");
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t sp = 0; sp < 2; ++sp) {
      const cplx f = alpha * q[2 * s + sp];
      if (f == cplx{}) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        cplx* orow = out.row(s * nb + b) + sp * nb;
        const cplx* xrow = x.row(b);
        for (std::size_t bp = 0; bp < nb; ++bp) orow[bp] += f * xrow[bp];
      }
    }
}

}  // namespace qb
}  // namespace corrsim
