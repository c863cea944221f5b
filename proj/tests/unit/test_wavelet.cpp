#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/wavelet.hpp"

using namespace wf;
using oracle::v2;

namespace {

GroupPtr make(GroupKind k, int d, std::vector<double> c = {}) {
  DilationGroupSpec s;
  s.kind = k;
  s.dimension = d;
  s.anisotropy = std::move(c);
  return build_group(s);
}

// int psi-hat(eta)^2 rho(eta) d eta over the bounding box, by the midpoint rule
// (spectrally accurate for smooth compactly supported integrands).
double lebesgue_admissibility(const BandlimitedWavelet& psi, const std::function<double(double, double)>& rho) {
  Vec lo, hi;
  psi.support().bounding_box(lo, hi);
  return oracle::midpoint2(
      [&](double a, double b) {
        const double p = psi.hat(v2(a, b));
        return p == 0.0 ? 0.0 : p * p * rho(a, b);
      },
      lo, hi, 600);
}

}  // namespace

TEST_CASE("profiles follow the window formulas") {
  const BandlimitedWavelet sb(FrequencyWindow::shearlet_box(2));
  CHECK(sb.profile(v2(1.7, 0.4)) == doctest::Approx(oracle::bump(2 * 1.7 - 3) * oracle::bump(0.4)));
  CHECK(sb.profile(v2(2.1, 0.0)) == 0.0);
  const BandlimitedWavelet ball(FrequencyWindow::ball(v2(1.5, 0), 0.5));
  CHECK(ball.profile(v2(1.6, 0.2)) == doctest::Approx(oracle::bump(std::hypot(0.1, 0.2) / 0.5)));
  const BandlimitedWavelet box(FrequencyWindow::box(v2(1, 1), v2(2, 3)));
  CHECK(box.profile(v2(1.2, 2.9)) == doctest::Approx(oracle::bump(2 * 1.2 - 3) * oracle::bump((2 * 2.9 - 4) / 2)));
  const BandlimitedWavelet sec(FrequencyWindow::annulus_sector(1, 2, DirectionPatch::cap(v2(0, 1), 0.5)));
  CHECK(sec.profile(v2(1.5, 0.0)) == 0.0);
  CHECK(sec.profile(v2(0, 1.5)) == doctest::Approx(1.0));

  // Zero outside the window, in [0, 1] inside.
  Rng rng = make_rng(3);
  for (const auto* w : {&sb, &ball, &box, &sec}) {
    for (int t = 0; t < 5000; ++t) {
      const Vec x = random_normal_vector(rng, 2) * 2.0;
      const double p = w->profile(x);
      REQUIRE(p >= 0.0);
      REQUIRE(p <= 1.0);
      if (!w->support().contains(x)) REQUIRE(p == 0.0);
    }
  }
}

TEST_CASE("kappa scales the amplitude") {
  const BandlimitedWavelet a(FrequencyWindow::shearlet_box(2), 4.0);
  CHECK(a.amplitude() == doctest::Approx(2.0));
  CHECK(a.hat(v2(1.5, 0)) == doctest::Approx(2.0));
  CHECK(a.with_kappa(9.0).hat(v2(1.5, 0)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(BandlimitedWavelet(FrequencyWindow::shearlet_box(2), -1.0), InvalidArgument);
}

TEST_CASE("dilated_hat is |det h|^1/2 e^{-2 pi i <x,xi>} psi-hat(h^T xi)") {
  auto g = make(GroupKind::Shearlet, 2, {0.5});
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2), 2.0);
  const GroupElement h = g->element(shearlet_params(1, 0.25, {0.1}));
  const Vec x = v2(0.3, -0.2);
  const Vec xi = h.inv_transpose * v2(1.4, 0.3);
  const std::complex<double> ref = std::sqrt(std::abs(h.matrix.determinant())) *
                                   std::exp(std::complex<double>(0, -2 * oracle::pi * x.dot(xi))) *
                                   psi.hat(h.matrix.transpose() * xi);
  const auto got = psi.dilated_hat(x, h, xi);
  CHECK(std::abs(got - ref) < 1e-14);
}

TEST_CASE("spatial evaluation is the inverse Fourier integral") {
  for (const auto& win : {FrequencyWindow::shearlet_box(2), FrequencyWindow::ball(v2(1.5, 0), 0.5),
                          FrequencyWindow::box(v2(1, 1), v2(2, 3)),
                          FrequencyWindow::annulus_sector(0.8, 1.25, DirectionPatch::diagonal_band(2, 0.25))}) {
    const BandlimitedWavelet psi(win, 1.7);
    Vec lo, hi;
    win.bounding_box(lo, hi);
    for (Vec z : {v2(0, 0), v2(0.3, -0.1), v2(-1.2, 2.0)}) {
      const double re = oracle::midpoint2(
          [&](double a, double b) { return psi.hat(v2(a, b)) * std::cos(2 * oracle::pi * (z[0] * a + z[1] * b)); }, lo, hi,
          800);
      const double im = oracle::midpoint2(
          [&](double a, double b) { return psi.hat(v2(a, b)) * std::sin(2 * oracle::pi * (z[0] * a + z[1] * b)); }, lo, hi,
          800);
      const Valued v = psi.spatial_eval(z);
      CAPTURE(to_string(win.kind));
      CHECK(std::abs(v.value - std::complex<double>(re, im)) < 1e-7);
      CHECK(v.error < 1e-6);
    }
    CHECK(psi.hat_l1() == doctest::Approx(psi.spatial_eval(v2(0, 0)).value.real()).epsilon(1e-9));
  }
}

TEST_CASE("admissibility integral equals the Lebesgue form") {
  struct Case {
    GroupPtr g;
    FrequencyWindow v;
    std::function<double(double, double)> rho;
    Vec xi;
  };
  const std::vector<Case> cases = {
      {make(GroupKind::Shearlet, 2, {0.5}), FrequencyWindow::shearlet_box(2),
       [](double a, double) { return 1 / (a * a); }, v2(1, 0)},
      {make(GroupKind::Similitude, 2), FrequencyWindow::ball(v2(1.5, 0), 0.5),
       [](double a, double b) { return 1 / (2 * oracle::pi * (a * a + b * b)); }, v2(1, 0)},
      {make(GroupKind::Diagonal, 2), FrequencyWindow::box(v2(1, 1), v2(2, 2)),
       [](double a, double b) { return 1 / std::abs(a * b); }, v2(1, 1) / std::sqrt(2.0)},
  };
  for (const auto& c : cases) {
    const BandlimitedWavelet psi(c.v);
    const double ref = lebesgue_admissibility(psi, c.rho);
    const Estimate e = admissibility_integral(*c.g, psi, c.xi);
    CHECK(e.value == doctest::Approx(ref).epsilon(1e-6));
    const BandlimitedWavelet n = normalize(*c.g, psi);
    CHECK(n.kappa() == doctest::Approx(1.0 / ref).epsilon(1e-6));
    REQUIRE(n.group);
    CHECK(n.group->kind == c.g->kind());
    // Constant on the orbit.
    Rng rng = make_rng(4);
    for (int t = 0; t < 5; ++t) {
      Vec xi = random_normal_vector(rng, 2) * 3.0;
      if (!c.g->in_open_orbit(xi)) continue;
      CHECK(admissibility_integral(*c.g, n, xi).value == doctest::Approx(1.0).epsilon(kAdmissibilityTol));
    }
  }
}

TEST_CASE("admissibility in d = 3 by Monte Carlo") {
  auto g = make(GroupKind::Shearlet, 3, {0.5, 0.5});
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(3));
  AdmissibilityOptions o;
  o.mc_samples = 200000;
  const Estimate e = admissibility_integral(*g, psi, oracle::v3(1, 0, 0), o);
  // int psi-hat^2 / eta_1^3 over (1,2) x B_1: a product of two 1d integrals.
  const double radial = oracle::simpson([](double r) { return std::pow(oracle::bump(r), 2) * 2 * oracle::pi * r; }, 0, 1);
  const double axial =
      oracle::simpson([](double a) { return std::pow(oracle::bump(2 * a - 3), 2) / (a * a * a); }, 1, 2);
  CHECK(std::abs(e.value - radial * axial) < 4 * e.stderr_ + 1e-3 * radial * axial);
}

TEST_CASE("windows outside the orbit are rejected") {
  auto g = make(GroupKind::Shearlet, 2, {0.5});
  const BandlimitedWavelet psi(FrequencyWindow::ball(v2(0, 1), 0.5));
  CHECK_THROWS_AS(normalize(*g, psi), DomainError);
}
