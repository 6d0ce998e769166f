#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "corrsim/errors.hpp"
#include "corrsim/model.hpp"
#include "oracles.hpp"

using namespace corrsim;

namespace {

constexpr double kPi = std::numbers::pi;

ModeSet custom_modes(std::vector<double> omegas, std::vector<double> gs,
                     double omega0) {
  ModeSet m;
  m.count = omegas.size();
  m.delta_omega = omegas.empty() ? 1.0 : omegas.front();
  m.omega0 = omega0;
  m.omegas = std::move(omegas);
  m.gs = std::move(gs);
  return m;
}

ModeSet random_modes(std::mt19937& rng, std::size_t count, double min_det) {
  std::uniform_real_distribution<double> uw(0.1, 4.0);
  std::uniform_real_distribution<double> ug(0.05, 0.6);
  std::vector<double> om, gs;
  for (std::size_t k = 0; k < count; ++k) {
    double w = uw(rng);
    while (std::abs(1.0 - w) < min_det) w = uw(rng);
    om.push_back(w);
    gs.push_back(ug(rng));
  }
  return custom_modes(om, gs, 1.0);
}

// int_0^S L(s + tau) e^{-b^2 s^2/4} ds by Simpson; the Gaussian regulator
// reproduces the mollified delta of the production half-line integrals.
cplx regularized_halfline(const ModeSet& modes, double tau, double b,
                          double s_max, std::size_t panels) {
  const double re = oracles::simpson(
      [&](double s) {
        return (kernel_L(modes, s + tau) * std::exp(-b * b * s * s / 4.0))
            .real();
      },
      0.0, s_max, panels);
  const double im = oracles::simpson(
      [&](double s) {
        return (kernel_L(modes, s + tau) * std::exp(-b * b * s * s / 4.0))
            .imag();
      },
      0.0, s_max, panels);
  return {re, im};
}

}  // namespace

TEST_CASE("discretize: direct evaluation of the coupling rule") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 255, 0.1, 1.0);
  CHECK(modes.omegas[9] == doctest::Approx(1.0));
  const double expected = std::sqrt(std::exp(-0.1) / kPi * 0.1);
  CHECK(modes.coupling(10) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(modes.coupling(10) == doctest::Approx(0.1697).epsilon(1e-2));
  for (std::size_t k = 1; k <= 255; ++k) {
    CHECK(modes.coupling(k) ==
          doctest::Approx(std::sqrt(j(modes.omegas[k - 1]) * 0.1))
              .epsilon(1e-15));
  }
}

TEST_CASE("discretize: degenerate zero density gives zero couplings") {
  const ModeSet modes = discretize([](double) { return 0.0; }, 8, 0.1, 1.0);
  for (double g : modes.gs) CHECK(g == 0.0);
}

TEST_CASE("discretize: Ohmic sum rule within 2%") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 255, 0.1, 1.0);
  double coupling_sum = 0.0;
  for (double g : modes.gs) coupling_sum += g * g;
  const double integral =
      oracles::simpson([&](double w) { return j(w); }, 0.0, 25.5, 20000);
  CHECK(std::abs(coupling_sum / integral - 1.0) < 0.02);
  CHECK(std::abs(modes.sum_rule_ratio - coupling_sum / integral) < 1e-6);
}

TEST_CASE("discretize: parameter validation") {
  CHECK_THROWS_AS(SpectralDensity::make_ohmic(0.0, 10.0), ConfigError);
  CHECK_THROWS_AS(SpectralDensity::make_lorentzian(1.0, -0.1), ConfigError);
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  CHECK_THROWS_AS(discretize(j, 0, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(discretize(j, 8, 0.0, 1.0), ConfigError);
}

TEST_CASE("build_interaction: exchange couplings and vacuum annihilation") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 6, 0.1, 1.0);
  const TruncatedBasis basis = modes.basis();
  const Interaction in = build_interaction(modes, basis);
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(std::abs(in.h_i(basis.index(0, k), basis.index(1, 0)) -
                   modes.coupling(k)) < 1e-15);
  }
  // H_I |0,vac> = 0: that column is empty.
  for (std::size_t r = 0; r < basis.dim(); ++r)
    CHECK(std::abs(in.h_i(r, basis.index(0, 0))) == 0.0);
  CHECK(in.h_i.hermiticity_defect() < 1e-15);

  const ComplexMatrix a2 = in.mode_op(2);
  for (std::size_t r = 0; r < basis.dim(); ++r)
    for (std::size_t c = 0; c < basis.dim(); ++c) {
      const bool hit = r == basis.index(0, 2) && c == basis.index(1, 0);
      CHECK(std::abs(a2(r, c) - (hit ? 1.0 : 0.0)) == 0.0);
    }
}

TEST_CASE("build_interaction: matches the projected full-space coupling") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 2, 0.35, 1.0);
  const TruncatedBasis basis = modes.basis();
  const Interaction in = build_interaction(modes, basis);

  const oracles::FullSpace full(modes);
  ComplexMatrix h_full(full.dim());
  for (const auto& c : full.couplings) {
    h_full(c.i, c.j) = c.g;
    h_full(c.j, c.i) = c.g;
  }
  // Project onto the restricted basis states.
  std::vector<std::size_t> map(basis.dim());
  for (std::size_t s = 0; s < 2; ++s) {
    map[basis.index(s, 0)] = full.index(s, 0);
    for (std::size_t k = 1; k <= 2; ++k)
      map[basis.index(s, k)] = full.index(s, std::size_t{1} << (k - 1));
  }
  for (std::size_t r = 0; r < basis.dim(); ++r)
    for (std::size_t c = 0; c < basis.dim(); ++c)
      CHECK(std::abs(in.h_i(r, c) - h_full(map[r], map[c])) < 1e-15);
}

TEST_CASE("interaction picture: tau=0, resonance, phase conjugation") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 12, 0.1, 1.0);
  const TruncatedBasis basis = modes.basis();
  const Interaction in = build_interaction(modes, basis);

  ComplexMatrix h0 = hi_interaction_picture(modes, basis, 0.0);
  h0 -= in.h_i;
  CHECK(h0.max_abs() < 1e-15);

  // mode 10 is resonant: its entries do not move with tau
  for (double tau : {0.3, 1.7, 4.0}) {
    const ComplexMatrix h = hi_interaction_picture(modes, basis, tau);
    CHECK(std::abs(h(basis.index(0, 10), basis.index(1, 0)) -
                   modes.coupling(10)) < 1e-14);
    CHECK(h.hermiticity_defect() < 1e-14);
  }

  std::mt19937 rng(31);
  const ModeSet m3 = random_modes(rng, 3, 0.05);
  const TruncatedBasis b3 = m3.basis();
  const Interaction in3 = build_interaction(m3, b3);
  std::uniform_real_distribution<double> ut(0.0, 5.0);
  for (int rep = 0; rep < 5; ++rep) {
    const double tau = ut(rng);
    const ComplexMatrix h = hi_interaction_picture(m3, b3, tau);
    ComplexMatrix conj_h(b3.dim());
    for (std::size_t r = 0; r < b3.dim(); ++r)
      for (std::size_t c = 0; c < b3.dim(); ++c) {
        const double er = in3.sys_phase[r] + in3.bath_phase[r];
        const double ec = in3.sys_phase[c] + in3.bath_phase[c];
        conj_h(r, c) = std::exp(cplx(0.0, (er - ec) * tau)) * in3.h_i(r, c);
      }
    conj_h -= h;
    CHECK(conj_h.max_abs() < 1e-12);
  }
}

TEST_CASE("kernel_L: fixed values, independent sum, conjugation symmetry") {
  std::mt19937 rng(37);
  const ModeSet m5 = random_modes(rng, 5, 0.02);
  double g2_sum = 0.0;
  for (double g : m5.gs) g2_sum += g * g;
  CHECK(kernel_L(m5, 0.0).real() == doctest::Approx(g2_sum).epsilon(1e-14));
  CHECK(std::abs(kernel_L(m5, 0.0).imag()) < 1e-15);

  const ModeSet res = custom_modes({1.0}, {0.3}, 1.0);
  for (double u : {0.0, 1.0, -2.5})
    CHECK(std::abs(kernel_L(res, u) - cplx(0.09, 0.0)) < 1e-15);

  std::uniform_real_distribution<double> uu(-6.0, 6.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double u = uu(rng);
    // independent summation at extended precision, reversed order
    long double re = 0.0L, im = 0.0L;
    for (std::size_t k = m5.count; k >= 1; --k) {
      const long double g2 = (long double)m5.coupling(k) * m5.coupling(k);
      const long double ph = (long double)(m5.omega0 - m5.omegas[k - 1]) * u;
      re += g2 * cosl(ph);
      im += g2 * sinl(ph);
    }
    const cplx l = kernel_L(m5, u);
    CHECK(std::abs(l - cplx((double)re, (double)im)) < 1e-14);
    CHECK(std::abs(kernel_L(m5, -u) - std::conj(l)) < 1e-14);
  }
}

TEST_CASE("phi: limits and quadrature oracle") {
  const ModeSet m = custom_modes({1.0, 0.5}, {0.1, 0.2}, 1.0);
  CHECK(std::abs(phi(m, 1, 0.0)) == 0.0);
  CHECK(std::abs(phi(m, 2, 0.0)) == 0.0);
  CHECK(phi(m, 1, 2.3) == cplx(2.3, 0.0));  // resonant mode

  // detuning 0.5, tau = 2 against midpoint quadrature
  const double det = 0.5, tau = 2.0;
  const std::size_t n = 100000;
  cplx acc{};
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (static_cast<double>(i) + 0.5) * tau / n;
    acc += std::exp(cplx(0.0, -det * s));
  }
  acc *= tau / static_cast<double>(n);
  CHECK(std::abs(phi(m, 2, tau) - acc) < 1e-8);
}

TEST_CASE("redfield_rates: continuum oracle and principal-value limits") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 255, 0.1, 1.0);
  const RatePair r = redfield_rates(modes, 0.1);
  CHECK(std::abs(r.gamma - kPi * j(1.0)) / (kPi * j(1.0)) < 0.05);
  CHECK(std::abs(r.gamma - std::exp(-0.1)) / std::exp(-0.1) < 0.05);

  const ModeSet res = custom_modes({1.0}, {0.3}, 1.0);
  CHECK(redfield_rates(res, 0.1).epsilon == 0.0);

  const ModeSet pair = custom_modes({0.7, 1.3}, {0.2, 0.2}, 1.0);
  CHECK(std::abs(redfield_rates(pair, 0.1).epsilon) < 1e-15);
}

TEST_CASE("tcl2_rates: limits, Redfield approach, quadrature oracle") {
  RatePair r0 = tcl2_rates(custom_modes({0.4, 1.9}, {0.3, 0.1}, 1.0), 0.0);
  CHECK(r0.gamma == 0.0);
  CHECK(r0.epsilon == 0.0);

  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet fig1 = discretize(j, 255, 0.1, 1.0);
  const RatePair rr = redfield_rates(fig1, 0.1);
  const RatePair rt = tcl2_rates(fig1, 20.0);
  CHECK(std::abs(rt.gamma - rr.gamma) / rr.gamma < 0.05);

  std::mt19937 rng(41);
  const ModeSet m3 = random_modes(rng, 3, 0.02);
  for (double tau : {0.7, 2.9}) {
    const RatePair rt3 = tcl2_rates(m3, tau);
    const double re = oracles::simpson(
        [&](double u) { return kernel_L(m3, u).real(); }, 0.0, tau, 20000);
    const double im = oracles::simpson(
        [&](double u) { return kernel_L(m3, u).imag(); }, 0.0, tau, 20000);
    CHECK(std::abs(rt3.gamma - re) < 1e-8);
    CHECK(std::abs(rt3.epsilon - im) < 1e-8);
  }
}

TEST_CASE("cr_rates: tau=0 matches Redfield; per-mode identity; late decay") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet fig1 = discretize(j, 255, 0.1, 1.0);
  const RatePair rr = redfield_rates(fig1, 0.1);
  const RatePair rc0 = cr_rates(fig1, 0.0, 0.1);
  CHECK(rc0.gamma == doctest::Approx(rr.gamma).epsilon(1e-14));
  CHECK(rc0.epsilon == doctest::Approx(rr.epsilon).epsilon(1e-14));

  // identical by construction to the phased per-mode sum
  for (double tau : {0.5, 3.0, 11.0}) {
    const RatePair rc = cr_rates(fig1, tau, 0.1);
    cplx sum{};
    for (std::size_t k = 1; k <= fig1.count; ++k) {
      const double d = fig1.detuning(k);
      const double g2 = fig1.coupling(k) * fig1.coupling(k);
      cplx ck(kPi * gaussian_delta(d, 0.1), 0.0);
      if (std::abs(d) >= kResonanceTol) ck += cplx(0.0, 1.0 / d);
      sum += g2 * std::exp(cplx(0.0, d * tau)) * ck;
    }
    CHECK(rc.gamma == doctest::Approx(sum.real()).epsilon(1e-13));
    CHECK(rc.epsilon == doctest::Approx(sum.imag()).epsilon(1e-13));
  }
  // correction rates die off once the kernel has decayed
  CHECK(std::abs(cr_rates(fig1, 20.0, 0.1).gamma) < 0.1 * rr.gamma);
}

TEST_CASE("cr_rates: regularized half-line quadrature oracle") {
  std::mt19937 rng(43);
  const ModeSet m3 = random_modes(rng, 3, 0.8);
  const double tau = 1.3, b = 1e-3;
  const cplx oracle = regularized_halfline(m3, tau, b, 8.0 / b, 2400000);
  const RatePair rc = cr_rates(m3, tau, b);
  const RatePair rr = redfield_rates(m3, b);
  // gamma_c = gamma_R - sine sum; the oracle evaluates the same half-line
  // integral directly.
  CHECK(std::abs(rc.gamma - oracle.real()) < 1e-6);
  CHECK(std::abs(rc.epsilon - oracle.imag()) < 1e-6);
  CHECK(std::abs(rr.gamma) < 1e-9);  // far off resonance, delta part inert
}

TEST_CASE("redfield_K: resonant mode, Hermiticity, quadrature oracle") {
  const ModeSet res = custom_modes({1.0}, {0.3}, 1.0);
  const TruncatedBasis b1 = res.basis();
  const double bw = 0.05;
  for (double tau : {0.0, 1.2}) {
    const ComplexMatrix k = redfield_K(res, b1, tau, bw);
    const double expect = 0.3 * kPi * gaussian_delta(0.0, bw);
    CHECK(std::abs(k(b1.index(0, 1), b1.index(1, 0)) - expect) < 1e-12);
    CHECK(std::abs(k(b1.index(0, 1), b1.index(1, 0)).imag()) == 0.0);
    CHECK(k.hermiticity_defect() < 1e-12);
  }

  std::mt19937 rng(47);
  const ModeSet m3 = random_modes(rng, 3, 0.8);
  const TruncatedBasis b3 = m3.basis();
  const ComplexMatrix k = redfield_K(m3, b3, 0.9, 1e-3);
  CHECK(k.hermiticity_defect() < 1e-12);
  // entrywise against int_0^S g e^{-i d (tau - s)} w_b(s) ds
  for (std::size_t kk = 1; kk <= 3; ++kk) {
    const double d = m3.detuning(kk), g = m3.coupling(kk), bb = 1e-3;
    const double re = oracles::simpson(
        [&](double s) {
          return g * std::cos(-d * (0.9 - s)) * std::exp(-bb * bb * s * s / 4);
        },
        0.0, 8.0 / bb, 2400000);
    const double im = oracles::simpson(
        [&](double s) {
          return g * std::sin(-d * (0.9 - s)) * std::exp(-bb * bb * s * s / 4);
        },
        0.0, 8.0 / bb, 2400000);
    CHECK(std::abs(k(b3.index(0, kk), b3.index(1, 0)) - cplx(re, im)) < 1e-6);
  }
}

TEST_CASE("gap components: they sum to the interaction Hamiltonian") {
  std::mt19937 rng(53);
  const ModeSet m3 = random_modes(rng, 4, 0.02);
  const TruncatedBasis b = m3.basis();
  for (double tau : {0.0, 0.8, 2.7}) {
    ComplexMatrix sum = hi_gap_component(m3, b, +1, tau);
    sum += hi_gap_component(m3, b, -1, tau);
    sum -= hi_interaction_picture(m3, b, tau);
    CHECK(sum.max_abs() < 1e-13);
  }
}

TEST_CASE("interaction commutes with total excitation number") {
  const auto j = SpectralDensity::make_ohmic(1.0, 10.0);
  const ModeSet modes = discretize(j, 8, 0.1, 1.0);
  const TruncatedBasis basis = modes.basis();
  const Interaction in = build_interaction(modes, basis);
  ComplexMatrix number(basis.dim());
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t bb = 0; bb <= 8; ++bb)
      number(basis.index(s, bb), basis.index(s, bb)) =
          static_cast<double>(s + (bb > 0 ? 1 : 0));
  CHECK(hs_norm(commutator(in.h_i, number)) < 1e-12);
}
