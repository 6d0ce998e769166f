#include "corrsim/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrsim/errors.hpp"

namespace corrsim {

namespace {

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()) + ")");
  }
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

void ComplexMatrix::set_zero() { std::fill(a_.begin(), a_.end(), cplx{}); }

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      out(c, r) = std::conj((*this)(r, c));
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::hermiticity_defect() const {
  double m = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return m;
}

bool ComplexMatrix::all_finite() const {
  for (const cplx& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_dim(*this, o, "operator+=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_dim(*this, o, "operator-=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (cplx& z : a_) z *= s;
  return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "matmul");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx* arow = a.row(i);
    cplx* orow = out.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = arow[k];
      if (aik == cplx{}) continue;
      const cplx* brow = b.row(k);
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "commutator");
  ComplexMatrix out = matmul(a, b);
  out -= matmul(b, a);
  return out;
}

ComplexMatrix tensor_sb(const ComplexMatrix& sys, const ComplexMatrix& bath,
                        const TruncatedBasis& basis) {
  if (sys.dim() != 2 || bath.dim() != basis.bath_dim()) {
    throw ConfigError("tensor_sb: operand dimensions do not match the basis");
  }
  const std::size_t nb = basis.bath_dim();
  ComplexMatrix out(basis.dim());
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t sp = 0; sp < 2; ++sp) {
      const cplx f = sys(s, sp);
      if (f == cplx{}) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        const cplx* brow = bath.row(b);
        cplx* orow = out.row(basis.index(s, b)) + sp * nb;
        for (std::size_t bp = 0; bp < nb; ++bp) orow[bp] += f * brow[bp];
      }
    }
  return out;
}

ComplexMatrix ptrace_bath(const ComplexMatrix& a, const TruncatedBasis& basis) {
  if (a.dim() != basis.dim())
    throw ConfigError("ptrace_bath: dimension mismatch with basis");
  const std::size_t nb = basis.bath_dim();
  ComplexMatrix out(2);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t sp = 0; sp < 2; ++sp) {
      cplx acc{};
      for (std::size_t b = 0; b < nb; ++b)
        acc += a(basis.index(s, b), basis.index(sp, b));
      out(s, sp) = acc;
    }
  return out;
}

ComplexMatrix ptrace_sys(const ComplexMatrix& a, const TruncatedBasis& basis) {
  if (a.dim() != basis.dim())
    throw ConfigError("ptrace_sys: dimension mismatch with basis");
  const std::size_t nb = basis.bath_dim();
  ComplexMatrix out(nb);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t bp = 0; bp < nb; ++bp)
      out(b, bp) = a(b, bp) + a(nb + b, nb + bp);
  return out;
}

namespace {

// One cyclic Jacobi pass; returns the largest off-diagonal magnitude seen
// before rotating. V accumulates the rotations when non-null.
double jacobi_sweep(ComplexMatrix& m, ComplexMatrix* v, double tol) {
  const std::size_t n = m.dim();
  double off_max = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const cplx apq = m(p, q);
      const double alpha = std::abs(apq);
      off_max = std::max(off_max, alpha);
      if (alpha <= tol) continue;

      const cplx w = apq / alpha;  // phase of the pivot
      const double app = m(p, p).real();
      const double aqq = m(q, q).real();
      const double theta = (aqq - app) / (2.0 * alpha);
      const double sign = theta >= 0.0 ? 1.0 : -1.0;
      const double t = sign / (std::abs(theta) + std::hypot(1.0, theta));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;

      // A <- J^H A J with J[p,p]=c, J[p,q]=s*w, J[q,p]=-s*conj(w), J[q,q]=c.
      m(p, p) = app * c * c - 2.0 * alpha * s * c + aqq * s * s;
      m(q, q) = app * s * s + 2.0 * alpha * s * c + aqq * c * c;
      m(p, q) = 0.0;
      m(q, p) = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == p || r == q) continue;
        const cplx mrp = m(r, p);
        const cplx mrq = m(r, q);
        m(r, p) = c * mrp - s * std::conj(w) * mrq;
        m(r, q) = s * w * mrp + c * mrq;
        m(p, r) = std::conj(m(r, p));
        m(q, r) = std::conj(m(r, q));
      }
      if (v) {
        for (std::size_t r = 0; r < n; ++r) {
          const cplx vrp = (*v)(r, p);
          const cplx vrq = (*v)(r, q);
          (*v)(r, p) = c * vrp - s * std::conj(w) * vrq;
          (*v)(r, q) = s * w * vrp + c * vrq;
        }
      }
    }
  }
  return off_max;
}

constexpr int kMaxJacobiSweeps = 100;
constexpr double kHermitianInputTol = 1e-10;

EigenSystem jacobi_eigensystem(const ComplexMatrix& a, double tol,
                               bool want_vectors) {
  if (a.hermiticity_defect() > kHermitianInputTol) {
    throw std::invalid_argument(
        "hermitian_eigenvalues: input is not Hermitian within 1e-10");
  }
  const std::size_t n = a.dim();
  // Symmetrize to suppress round-off drift before rotating.
  ComplexMatrix m(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      m(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));

  EigenSystem sys;
  if (want_vectors) sys.vectors = ComplexMatrix::identity(n);
  ComplexMatrix* vp = want_vectors ? &sys.vectors : nullptr;

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    if (jacobi_sweep(m, vp, tol) <= tol) converged = true;
  }
  if (!converged) {
    // The last sweep may have pushed the remaining pivots under tol.
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        off = std::max(off, std::abs(m(p, q)));
    if (off > tol)
      throw NumericalError("jacobi eigensolver: no convergence in 100 sweeps");
  }

  sys.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.values[i] = m(i, i).real();

  // Sort ascending, permuting the eigenvector columns along.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return sys.values[i] < sys.values[j];
  });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = sys.values[order[i]];
  sys.values = std::move(sorted);
  if (want_vectors) {
    ComplexMatrix vs(n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) vs(r, c) = sys.vectors(r, order[c]);
    sys.vectors = std::move(vs);
  }
  return sys;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a, double tol) {
  return jacobi_eigensystem(a, tol, false).values;
}

EigenSystem hermitian_eigensystem(const ComplexMatrix& a, double tol) {
  return jacobi_eigensystem(a, tol, true);
}

double hs_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r) {
    const cplx* row = a.row(r);
    for (std::size_t c = 0; c < a.dim(); ++c) acc += std::norm(row[c]);
  }
  return std::sqrt(acc);
}

double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "hs_distance");
  double acc = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r) {
    const cplx* ra = a.row(r);
    const cplx* rb = b.row(r);
    for (std::size_t c = 0; c < a.dim(); ++c) acc += std::norm(ra[c] - rb[c]);
  }
  return std::sqrt(acc);
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  if (rho.hermiticity_defect() > kHermitianInputTol ||
      sigma.hermiticity_defect() > kHermitianInputTol) {
    throw std::invalid_argument("trace_distance: inputs must be Hermitian");
  }
  ComplexMatrix diff = rho;
  diff -= sigma;
  double acc = 0.0;
  for (double ev : hermitian_eigenvalues(diff)) acc += std::abs(ev);
  return 0.5 * acc;
}

}  // namespace corrsim
