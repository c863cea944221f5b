#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/sampling.hpp"

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

}  // namespace

TEST_CASE("cap fractions") {
  CHECK(cap_fraction(2, oracle::pi / 2) == doctest::Approx(0.5));
  CHECK(cap_fraction(2, 0.3) == doctest::Approx(0.3 / oracle::pi));
  // Archimedes: the area of a cap on S^2 is 2 pi (1 - cos phi).
  CHECK(cap_fraction(3, 0.7) == doctest::Approx((1 - std::cos(0.7)) / 2));
  CHECK(cap_fraction(5, oracle::pi) == 1.0);

  Rng rng = make_rng(6);
  const Vec axis = oracle::v3(0, 0, 1);
  int below = 0;
  for (int t = 0; t < 20000; ++t) {
    const Vec u = sample_in_cap(rng, axis, 0.9);
    REQUIRE(u.norm() == doctest::Approx(1.0));
    REQUIRE(std::acos(u[2]) <= 0.9 + 1e-12);
    below += std::acos(u[2]) < 0.45;
  }
  // Uniform on the cap: P(angle < 0.45) is the ratio of cap areas.
  const double p = (1 - std::cos(0.45)) / (1 - std::cos(0.9));
  CHECK(std::abs(below / 20000.0 - p) < 4 * std::sqrt(p * (1 - p) / 20000));
}

TEST_CASE("stay measure equals a Lebesgue integral over V") {
  // mu(H_{xi,V}) after the change of variables eta = h^T xi:
  //   diagonal    int_V d eta / |eta_1 eta_2|
  //   similitude  int_V d eta / (2 pi |eta|^2)
  //   shearlet    int_V d eta / eta_1^2
  struct Case {
    GroupPtr g;
    FrequencyWindow v;
    std::function<double(double, double)> density;
    Vec xi;
  };
  const std::vector<Case> cases = {
      {make(GroupKind::Diagonal, 2), FrequencyWindow::box(v2(1, 1), v2(2, 3)),
       [](double a, double b) { return 1 / std::abs(a * b); }, v2(0.5, -2.0)},
      {make(GroupKind::Similitude, 2), FrequencyWindow::ball(v2(1.5, 0), 0.5),
       [](double a, double b) { return 1 / (2 * oracle::pi * (a * a + b * b)); }, v2(0.3, 4.0)},
      {make(GroupKind::Shearlet, 2, {0.5}), FrequencyWindow::shearlet_box(2),
       [](double a, double) { return 1 / (a * a); }, v2(-2.0, 0.7)},
  };
  for (const auto& c : cases) {
    Vec lo, hi;
    c.v.bounding_box(lo, hi);
    const double ref = oracle::midpoint2(
        [&](double a, double b) { return c.v.contains(v2(a, b)) ? c.density(a, b) : 0.0; }, lo, hi, 1500);
    const Estimate mc = stay_measure(*c.g, c.xi, c.v, 200000, 3);
    CHECK(std::abs(mc.value - ref) < 4 * mc.stderr_ + 2e-3 * ref);
    const StayChart chart = stay_chart(*c.g, c.xi, c.v);
    const Estimate gl = integrate_stay_gl(chart, [&](const Vec& e) { return c.v.contains(e) ? 1.0 : 0.0; }, 24);
    CHECK(gl.value == doctest::Approx(ref).epsilon(2e-3));
  }
}

TEST_CASE("stay chart dual images are h^T xi") {
  Rng rng = make_rng(14);
  for (auto g : {make(GroupKind::Shearlet, 2, {0.5}), make(GroupKind::Diagonal, 2), make(GroupKind::Similitude, 2)}) {
    const Vec xi = v2(0.8, 0.6);
    const FrequencyWindow v = g->kind() == GroupKind::Shearlet ? FrequencyWindow::shearlet_box(2)
                              : g->kind() == GroupKind::Diagonal ? FrequencyWindow::box(v2(1, 1), v2(2, 2))
                                                                  : FrequencyWindow::ball(v2(0, 2), 0.5);
    const StayChart c = stay_chart(*g, xi, v);
    for (int t = 0; t < 200; ++t) {
      Vec s(2);
      for (int i = 0; i < 2; ++i) s[i] = uniform(rng, c.lo[i], c.hi[i]);
      const GroupElement h = c.element(s);
      REQUIRE((h.matrix.transpose() * xi - c.dual_image(s)).norm() < 1e-10);
    }
  }
  CHECK_THROWS_AS(stay_chart(*make(GroupKind::Shearlet, 2, {0.5}), v2(0, 1), FrequencyWindow::shearlet_box(2)),
                  DomainError);
}

TEST_CASE("Haar invariance oracle is satisfied by the built-in densities") {
  SUBCASE("shearlet") {
    auto g = make(GroupKind::Shearlet, 2, {0.5});
    const auto r = haar_invariance_check(*g, v2(0.5, -1), v2(2, 1), g->element(shearlet_params(1, 0.3, {0.8})), 100000, 5);
    CHECK(r.z < 3.0);
  }
  SUBCASE("similitude") {
    auto g = make(GroupKind::Similitude, 2);
    const auto r = haar_invariance_check(*g, v2(0.5, -1), v2(2, 1), g->element(similitude_params_2d(2.0, 0.4)), 100000, 5);
    CHECK(r.z < 3.0);
  }
  SUBCASE("diagonal") {
    auto g = make(GroupKind::Diagonal, 2);
    const auto r = haar_invariance_check(*g, v2(0.5, 0.5), v2(2, 3), g->element(diagonal_params({3.0, 0.2})), 100000, 5);
    CHECK(r.z < 3.0);
  }
}

TEST_CASE("Haar invariance oracle rejects a wrong density") {
  // a^{-1} instead of a^{-2} on the shearlet group must be detected.
  auto g = make(GroupKind::Shearlet, 2, {0.5});
  auto chart = std::make_shared<CustomChart>();
  chart->param_dim = 2;
  chart->matrix = [](const Vec& t) { return oracle::shearlet2(t[0], t[1], 0.5); };
  chart->haar_density = [](const Vec& t) { return 1.0 / t[0]; };
  chart->in_domain = [](const Vec& t) { return t[0] > 0; };
  chart->chart_of = [](const Mat& m) { return v2(m(0, 0), m(0, 1)); };
  chart->orbit_predicate = [](const Vec& x) { return x[0] != 0; };
  chart->base_point = v2(1, 0);
  DilationGroupSpec s;
  s.kind = GroupKind::Custom;
  s.dimension = 2;
  s.custom = chart;
  auto wrong = build_group(s);
  const auto r = haar_invariance_check(*wrong, v2(0.5, -1), v2(2, 1), wrong->element(v2(0.3, 0.8)), 100000, 5);
  CHECK(r.z > 10.0);
}

TEST_CASE("K_o samples are in K_o and reproducible") {
  auto g = make(GroupKind::Shearlet, 2, {0.5});
  const auto w = DirectionPatch::axis_band(2, 0.3);
  const auto v = FrequencyWindow::shearlet_box(2);
  const auto a = sample_K_o(*g, w, v, 5, 500, 42);
  const auto b = sample_K_o(*g, w, v, 5, 500, 42);
  REQUIRE(a.size() == 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].h.params == b[i].h.params);
    REQUIRE_FALSE(k_o_contains(a[i].h, w, v, 5).is_false());
    REQUIRE(a[i].weight > 0);
  }
  // Scale bound: |h^-T xi| > R needs the scale below max|V| / R.
  const KoRegion reg = ko_region(*g, w, v, 5, 18);
  for (const auto& e : a) REQUIRE(g->scale_of(e.h) <= reg.scale_max * (1 + 1e-12));
}

TEST_CASE("Haar-weighted K_o samples integrate a known function") {
  // Similitude with a cap covering the whole circle: K_o is {a < max|V| / R},
  // so over 18 octaves the Haar measure is 18 ln 2.
  auto g = make(GroupKind::Similitude, 2);
  const auto w = DirectionPatch::cap(v2(1, 0), 2.5);
  const auto v = FrequencyWindow::ball(v2(1.5, 0), 0.5);
  const auto s = sample_K_o(*g, w, v, 1.0, 20000, 9);
  double total = 0;
  for (const auto& e : s) total += e.weight;
  CHECK(total == doctest::Approx(18 * std::log(2.0)).epsilon(0.02));
}
