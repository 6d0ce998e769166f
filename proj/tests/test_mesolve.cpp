#include <doctest.h>

#include <cmath>
#include <random>

#include "corrsim/errors.hpp"
#include "corrsim/exact.hpp"
#include "corrsim/mesolve.hpp"
#include "oracles.hpp"

using namespace corrsim;

namespace {

ModeSet fig1_small(std::size_t m) {
  return discretize(SpectralDensity::make_ohmic(1.0, 10.0), m, 0.1, 1.0);
}

ModeSet zero_coupling(std::size_t m) {
  ModeSet modes = fig1_small(m);
  std::fill(modes.gs.begin(), modes.gs.end(), 0.0);
  return modes;
}

ModeSet strong3() {
  ModeSet m;
  m.count = 3;
  m.delta_omega = 0.4;
  m.omega0 = 1.0;
  m.omegas = {0.6, 1.0, 1.4};
  m.gs = {0.3, 0.4, 0.3};
  return m;
}

ComplexMatrix plus_state() {
  ComplexMatrix r(2);
  r(0, 0) = r(0, 1) = r(1, 0) = r(1, 1) = 0.5;
  return r;
}

ComplexMatrix dense_coupling(const std::vector<cplx>& w,
                             const TruncatedBasis& basis) {
  ComplexMatrix h(basis.dim());
  for (std::size_t b = 1; b < basis.bath_dim(); ++b) {
    h(basis.index(0, b), basis.index(1, 0)) = w[b];
    h(basis.index(1, 0), basis.index(0, b)) = std::conj(w[b]);
  }
  return h;
}

// capture rho_S on every grid step
struct TrajCapture {
  std::vector<Qubit> rho;
  SolverOptions options() {
    SolverOptions o;
    o.sample_stride = 1;
    o.observer = [this](const StepView& v) {
      if (rho.size() <= v.step) rho.resize(v.step + 1);
      rho[v.step] = v.rho_s;
    };
    return o;
  }
};

double qtd(const Qubit& x, const Qubit& y) {
  const Qubit d{x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]};
  const double m = 0.5 * (d[0].real() + d[3].real());
  const double h = 0.5 * (d[0].real() - d[3].real());
  const double r = std::sqrt(h * h + std::norm(d[1]));
  return 0.5 * (std::abs(m + r) + std::abs(m - r));
}

}  // namespace

TEST_CASE("all solvers: zero coupling keeps the state frozen") {
  const ModeSet modes = zero_coupling(4);
  const TruncatedBasis basis = modes.basis();
  const ComplexMatrix rho0 = plus_state();
  for (MethodId m : kAllMethods) {
    const MethodResult r = solve(m, modes, basis, rho0, 0.01, 1.0, 0.1);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      CHECK(std::abs(r.rho11[i] - 0.5) < 1e-12);
      CHECK(std::abs(r.coherence[i] - 0.5) < 1e-12);
    }
    CHECK_FALSE(r.neg_pop_any);
  }
}

TEST_CASE("all solvers: trace stays at one along the way") {
  const ModeSet modes = fig1_small(16);
  const TruncatedBasis basis = modes.basis();
  const ComplexMatrix rho0 = plus_state();
  for (MethodId m : kAllMethods) {
    TrajCapture cap;
    solve(m, modes, basis, rho0, 0.001, 0.5, 0.1, cap.options());
    for (const Qubit& q : cap.rho) {
      CHECK(std::abs(qtrace(q) - cplx(1.0)) < 1e-9);
      CHECK(qhermiticity_defect(q) < 1e-10);
    }
  }
}

TEST_CASE("redfield: closed-form decay of population and coherence") {
  const ModeSet modes = fig1_small(64);
  const RatePair r = redfield_rates(modes, 0.1);
  TrajCapture cap;
  solve_redfield(modes, plus_state(), 0.0005, 1.0, 0.1, cap.options());
  const Qubit end = cap.rho.back();
  CHECK(std::abs(end[3].real() - 0.5 * std::exp(-2.0 * r.gamma)) <
        1e-6 * 0.5 * std::exp(-2.0 * r.gamma));
  CHECK(std::abs(std::abs(end[1]) - 0.5 * std::exp(-r.gamma)) <
        1e-6 * 0.5 * std::exp(-r.gamma));
}

TEST_CASE("redfield: zero decay leaves a pure phase rotation") {
  // detuned modes with a tiny delta width: gamma ~ 0, epsilon finite
  ModeSet m;
  m.count = 2;
  m.delta_omega = 0.3;
  m.omega0 = 1.0;
  m.omegas = {0.3, 0.6};
  m.gs = {0.2, 0.25};
  const RatePair r = redfield_rates(m, 1e-4);
  REQUIRE(r.gamma < 1e-15);
  TrajCapture cap;
  solve_redfield(m, plus_state(), 0.001, 2.0, 1e-4, cap.options());
  const Qubit end = cap.rho.back();
  CHECK(std::abs(std::abs(end[1]) - 0.5) < 1e-9);
  const cplx expect = 0.5 * std::exp(cplx(0.0, r.epsilon * 2.0));
  CHECK(std::abs(end[1] - expect) < 1e-8);
}

TEST_CASE("tcl2: flat start (quadratic early decay)") {
  const ModeSet modes = fig1_small(16);
  TrajCapture cap;
  solve_tcl2(modes, plus_state(), 1e-4, 0.02, cap.options());
  const double p0 = 0.5;
  const double d_full = p0 - cap.rho.back()[3].real();
  const double d_half = p0 - cap.rho[cap.rho.size() / 2][3].real();
  CHECK(d_full / d_half == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("tcl2: rate form equals the operator-level double commutator") {
  const ModeSet modes = strong3();
  const TruncatedBasis basis = modes.basis();
  std::mt19937 rng(83);
  ComplexMatrix vac(basis.bath_dim());
  vac(0, 0) = 1.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::uniform_real_distribution<double> ut(0.01, 4.0);
    const double tau = ut(rng);
    const ComplexMatrix rho = oracles::random_density(rng, 2);

    std::vector<cplx> w(basis.bath_dim());
    for (std::size_t k = 1; k <= 3; ++k)
      w[k] = modes.coupling(k) * phi(modes, k, tau);
    const ComplexMatrix k_op = dense_coupling(w, basis);
    const ComplexMatrix h_tau = hi_interaction_picture(modes, basis, tau);
    const ComplexMatrix p = tensor_sb(rho, vac, basis);

    ComplexMatrix inner = commutator(k_op, p);
    ComplexMatrix half_s(2);
    half_s(0, 0) = half_s(1, 1) = 0.5;
    ComplexMatrix ib(basis.bath_dim());
    for (std::size_t i = 0; i < basis.bath_dim(); ++i)
      ib(i, i) = 1.0 / static_cast<double>(basis.bath_dim());
    inner -= tensor_sb(half_s, ptrace_sys(inner, basis), basis);
    inner -= tensor_sb(ptrace_bath(inner, basis), ib, basis);
    ComplexMatrix rhs_op = ptrace_bath(commutator(h_tau, inner), basis);
    rhs_op *= cplx(-1.0, 0.0);

    const Qubit rhs_rate = tcl2_rhs(modes, tau, qubit_from(rho));
    ComplexMatrix diff = to_matrix(rhs_rate);
    diff -= rhs_op;
    CHECK(diff.max_abs() < 1e-10);
  }
}

TEST_CASE("cr: no initial slip") {
  const ModeSet modes = fig1_small(32);
  const Qubit rho0 = qubit_from(plus_state());
  const Qubit rhs0 = cr_rhs(modes, 0.0, 0.1, rho0, rho0);
  CHECK(qfrobenius(rhs0) < 1e-10);

  // redfield does slip at tau = 0
  const Qubit rhs_r = redfield_rhs(modes, 0.1, rho0);
  CHECK(qfrobenius(rhs_r) > 1e-2);
}

TEST_CASE("lindblad: generator equals redfield on random states") {
  const ModeSet modes = fig1_small(24);
  const TruncatedBasis basis = modes.basis();
  const LindbladGenerator gen = build_lindblad_generator(modes, basis, 0.1);
  std::mt19937 rng(89);
  for (int rep = 0; rep < 50; ++rep) {
    const Qubit rho = qubit_from(oracles::random_density(rng, 2));
    const Qubit a = gen.apply(rho);
    const Qubit b = redfield_rhs(modes, 0.1, rho);
    Qubit d = a;
    qaxpy(d, -1.0, b);
    CHECK(qfrobenius(d) < 1e-12);
  }
}

TEST_CASE("lindblad: generator is time independent in this frame") {
  const ModeSet modes = fig1_small(12);
  const TruncatedBasis basis = modes.basis();
  const LindbladGenerator g0 = build_lindblad_generator(modes, basis, 0.1, 0.0);
  const LindbladGenerator g1 =
      build_lindblad_generator(modes, basis, 0.1, 1.37);
  for (int i = 0; i < 4; ++i) {
    Qubit d = g0.columns[i];
    qaxpy(d, -1.0, g1.columns[i]);
    CHECK(qfrobenius(d) < 1e-12);
  }
}

TEST_CASE("nz2: no motion at tau = 0 and re-quadrature oracle") {
  const ModeSet modes = strong3();
  const TruncatedBasis basis = modes.basis();
  const ComplexMatrix rho0_m = plus_state();

  ComplexMatrix empty(basis.dim());
  CHECK(qfrobenius(nz2_rhs(modes, 0.0, empty)) == 0.0);

  const double dtau = 0.01, tau_final = 2.0;
  TrajCapture cap;
  solve_nz2(modes, basis, rho0_m, dtau, tau_final, cap.options());

  // Independent O(T^2) re-quadrature: recompute the memory from the stored
  // history at every step instead of accumulating it.
  const std::size_t nsteps =
      static_cast<std::size_t>(std::llround(tau_final / dtau));
  ComplexMatrix vac(basis.bath_dim());
  vac(0, 0) = 1.0;
  auto integrand = [&](double s, const Qubit& rho) {
    const ComplexMatrix h = hi_interaction_picture(modes, basis, s);
    return commutator(h, tensor_sb(to_matrix(rho), vac, basis));
  };
  std::vector<Qubit> hist{qubit_from(rho0_m)};
  auto memory_of = [&](const std::vector<Qubit>& hs) {
    ComplexMatrix mem(basis.dim());
    if (hs.size() < 2) return mem;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double w =
          (i == 0 || i + 1 == hs.size()) ? 0.5 * dtau : dtau;
      ComplexMatrix g = integrand(dtau * static_cast<double>(i), hs[i]);
      g *= cplx(w, 0.0);
      mem += g;
    }
    return mem;
  };
  auto rhs_of = [&](double tau, const ComplexMatrix& mem) {
    ComplexMatrix r = ptrace_bath(
        commutator(hi_interaction_picture(modes, basis, tau), mem), basis);
    r *= cplx(-1.0, 0.0);
    return qubit_from(r);
  };
  Qubit rho = qubit_from(rho0_m);
  for (std::size_t n = 0; n < nsteps; ++n) {
    const double tau = dtau * static_cast<double>(n);
    const ComplexMatrix mem = memory_of(hist);
    const Qubit f_n = rhs_of(tau, mem);
    Qubit pred = rho;
    qaxpy(pred, dtau, f_n);
    std::vector<Qubit> hist_pred = hist;
    hist_pred.push_back(pred);
    const Qubit f_p = rhs_of(tau + dtau, memory_of(hist_pred));
    qaxpy(rho, 0.5 * dtau, f_n);
    qaxpy(rho, 0.5 * dtau, f_p);
    hist.push_back(rho);
    CHECK(qtd(rho, cap.rho[n + 1]) < 1e-9);
  }
}

TEST_CASE("ull2: correlation accumulator invariants along the run") {
  const ModeSet modes = strong3();
  const TruncatedBasis basis = modes.basis();
  SolverOptions opts;
  opts.sample_stride = 1;
  std::size_t checked = 0;
  opts.observer = [&](const StepView& v) {
    REQUIRE(v.chi != nullptr);
    REQUIRE(v.rho_b != nullptr);
    if (v.step % 40 != 0) return;
    ++checked;
    CHECK(std::abs(v.chi->trace()) < 1e-10);
    CHECK(v.chi->hermiticity_defect() < 1e-10);
    CHECK(ptrace_bath(*v.chi, basis).max_abs() < 1e-9);
    CHECK(ptrace_sys(*v.chi, basis).max_abs() < 1e-9);
    CHECK(std::abs(v.rho_b->trace() - 1.0) < 1e-9);
    if (v.step == 0) CHECK(hs_norm(*v.chi) == 0.0);
  };
  solve_ull2(modes, basis, plus_state(), 0.002, 2.0, opts);
  CHECK(checked > 10);
}

TEST_CASE("ull2: error against exact shrinks at third order in coupling") {
  auto scaled = [](double f) {
    ModeSet m = strong3();
    for (double& g : m.gs) g *= f;
    return m;
  };
  auto max_err = [](const ModeSet& modes) {
    const TruncatedBasis basis = modes.basis();
    const double dtau = 0.002, tau_final = 2.0;
    const auto exact =
        evolve_exact(modes, initial_plus_state(3), dtau, tau_final,
                     ExactScheme::eigenprop);
    double err = 0.0;
    SolverOptions opts;
    opts.sample_stride = 1;
    opts.observer = [&](const StepView& v) {
      Qubit rho_ex{};
      ComplexMatrix chi(basis.dim());
      const PureState psi = to_interaction_picture(exact[v.step], modes);
      chi_exact_into(psi, basis, chi, &rho_ex);
      err = std::max(err, qtd(v.rho_s, rho_ex));
    };
    solve_ull2(modes, basis, plus_state(), dtau, tau_final, opts);
    return err;
  };
  const double e1 = max_err(scaled(0.1));
  const double e2 = max_err(scaled(0.2));
  CHECK(e1 < 10.0 * e2 / 8.0);
}

TEST_CASE("mll: no motion at tau = 0; tracks ull2 at short times") {
  const ModeSet modes = strong3();
  const TruncatedBasis basis = modes.basis();
  const Qubit rhs0 = mll_rhs(modes, 0.0, qubit_from(plus_state()));
  CHECK(qfrobenius(rhs0) < 1e-14);

  TrajCapture mll, ull;
  solve_mll(modes, basis, plus_state(), 0.001, 0.2, mll.options());
  solve_ull2(modes, basis, plus_state(), 0.001, 0.2, ull.options());
  const double d_02 = qtd(mll.rho[200], ull.rho[200]);
  const double d_01 = qtd(mll.rho[100], ull.rho[100]);
  const double d_005 = qtd(mll.rho[50], ull.rho[50]);
  const double c = d_02 / (0.2 * 0.2);
  CHECK(d_01 <= 1.5 * c * 0.1 * 0.1);
  CHECK(d_005 <= 1.5 * c * 0.05 * 0.05);
}

TEST_CASE("ull2, nz2, tcl2 agree at short times, gap closing quadratically") {
  const ModeSet modes = fig1_small(255);
  const TruncatedBasis basis = modes.basis();
  TrajCapture a, b, c;
  solve_ull2(modes, basis, plus_state(), 0.0005, 0.1, a.options());
  solve_nz2(modes, basis, plus_state(), 0.0005, 0.1, b.options());
  solve_tcl2(modes, plus_state(), 0.0005, 0.1, c.options());
  auto gap = [&](std::size_t n) {
    return std::max({qtd(a.rho[n], b.rho[n]), qtd(a.rho[n], c.rho[n]),
                     qtd(b.rho[n], c.rho[n])});
  };
  // tau = 0.1, 0.05, 0.025 on the delta_tau = 5e-4 grid
  const double g200 = gap(200), g100 = gap(100), g50 = gap(50);
  CHECK(g200 < 1e-2);
  CHECK(g100 < 0.35 * g200);
  CHECK(g50 < 0.35 * g100);
}

TEST_CASE("step halving moves the endpoint state by very little") {
  const ModeSet modes = fig1_small(16);
  const TruncatedBasis basis = modes.basis();
  for (MethodId m : kAllMethods) {
    TrajCapture coarse, fine;
    solve(m, modes, basis, plus_state(), 0.0005, 1.0, 0.1, coarse.options());
    solve(m, modes, basis, plus_state(), 0.00025, 1.0, 0.1, fine.options());
    const double d = qtd(coarse.rho.back(), fine.rho.back());
    CHECK(d < (m == MethodId::NZ2 ? 1e-5 : 1e-6));
  }
}

TEST_CASE("solver rejects malformed initial states") {
  const ModeSet modes = fig1_small(4);
  ComplexMatrix bad(2);
  bad(0, 0) = 0.7;  // trace != 1
  CHECK_THROWS_AS(solve_tcl2(modes, bad, 0.01, 1.0), ConfigError);
  CHECK_THROWS_AS(solve_tcl2(modes, plus_state(), -0.01, 1.0), ConfigError);
  CHECK_THROWS_AS(
      solve_ull2(modes, TruncatedBasis{7}, plus_state(), 0.01, 1.0),
      ConfigError);
}

TEST_CASE("method names round-trip") {
  for (MethodId m : kAllMethods) {
    const auto back = method_from_string(to_string(m));
    REQUIRE(back.has_value());
    CHECK(*back == m);
  }
  CHECK_FALSE(method_from_string("NOPE").has_value());
}
