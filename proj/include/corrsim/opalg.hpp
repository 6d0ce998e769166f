#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace corrsim {

using cplx = std::complex<double>;

// Product basis of a qubit and a bath restricted to at most one excitation:
// state (s, b) with s in {0,1} and b in {0 = vacuum, 1..M = excitation on
// mode b} sits at flat index s*(M+1) + b.
struct TruncatedBasis {
  std::size_t num_modes = 0;  // M

  std::size_t bath_dim() const { return num_modes + 1; }
  std::size_t dim() const { return 2 * (num_modes + 1); }
  std::size_t index(std::size_t s, std::size_t b) const {
    return s * (num_modes + 1) + b;
  }
};

// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return a_[r * dim_ + c];
  }
  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }
  cplx* row(std::size_t r) { return a_.data() + r * dim_; }
  const cplx* row(std::size_t r) const { return a_.data() + r * dim_; }

  void set_zero();
  ComplexMatrix adjoint() const;
  cplx trace() const;
  double max_abs() const;
  double hermiticity_defect() const;  // max |A - A^dag| over entries
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(const ComplexMatrix& a,
                                 const ComplexMatrix& b);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// AB - BA
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Embed sys (2x2) and bath ((M+1)x(M+1)) as sys (x) bath in the flat basis.
ComplexMatrix tensor_sb(const ComplexMatrix& sys, const ComplexMatrix& bath,
                        const TruncatedBasis& basis);

// out[s,s'] = sum_b A[(s,b),(s',b)]
ComplexMatrix ptrace_bath(const ComplexMatrix& a, const TruncatedBasis& basis);
// out[b,b'] = sum_s A[(s,b),(s,b')]
ComplexMatrix ptrace_sys(const ComplexMatrix& a, const TruncatedBasis& basis);

// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
// The input must be Hermitian within 1e-10; it is symmetrized before the
// sweeps. Rotations run until every off-diagonal magnitude is below tol.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a,
                                          double tol = 1e-12);

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column j pairs with values[j]
};
EigenSystem hermitian_eigensystem(const ComplexMatrix& a, double tol = 1e-12);

double hs_norm(const ComplexMatrix& a);                            // Frobenius
double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b);
// (1/2) sum_i |lambda_i(rho - sigma)|; both inputs Hermitian.
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

}  // namespace corrsim
