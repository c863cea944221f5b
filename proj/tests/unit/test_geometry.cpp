#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/geometry.hpp"

using namespace wf;
using oracle::v2;
using oracle::v3;

namespace {

GroupPtr make(GroupKind k, int d, std::vector<double> c = {}) {
  DilationGroupSpec s;
  s.kind = k;
  s.dimension = d;
  s.anisotropy = std::move(c);
  return build_group(s);
}

// Uniform points of V by rejection from a hand-picked enclosing box.
std::vector<Vec> points_in(const FrequencyWindow& v, const Vec& lo, const Vec& hi, int n, Rng& rng) {
  std::vector<Vec> out;
  while (static_cast<int>(out.size()) < n) {
    Vec p(lo.size());
    for (int i = 0; i < lo.size(); ++i) p[i] = uniform(rng, lo[i], hi[i]);
    if (v.contains(p)) out.push_back(p);
  }
  return out;
}

// Direct membership in the cone over the patch, from the patch definitions.
bool in_cone(const DirectionPatch& w, double R, const Vec& x) {
  const double n = x.norm();
  if (!(n > R)) return false;
  const Vec u = x / n;
  const double sd = std::sqrt(double(u.size()));
  switch (w.kind) {
    case PatchKind::SphericalCap: return (u - w.center).norm() < w.radius;
    case PatchKind::ShearletAxisBand: return std::abs(u[0] - 1.0) < w.eps;
    case PatchKind::DiagonalBand:
      for (int i = 0; i < u.size(); ++i)
        if (!(sd * u[i] > 1 / (1 + w.eps) && sd * u[i] < 1 + w.eps)) return false;
      return true;
  }
  return false;
}

}  // namespace

TEST_CASE("patch membership") {
  const DirectionPatch cap = DirectionPatch::cap(v2(1, 0), 0.5);
  CHECK(cap.contains_direction(v2(std::cos(0.4), std::sin(0.4))));   // chord 0.397
  CHECK_FALSE(cap.contains_direction(v2(std::cos(0.6), std::sin(0.6))));  // chord 0.591
  const DirectionPatch band = DirectionPatch::axis_band(2, 0.3);
  CHECK(band.contains_direction(v2(0.8, 0.6)));
  CHECK_FALSE(band.contains_direction(v2(0.6, 0.8)));
  CHECK_FALSE(band.contains_direction(v2(-1, 0)));
  const DirectionPatch diag = DirectionPatch::diagonal_band(2, 0.5);
  CHECK(diag.contains_direction(v2(1, 1) / std::sqrt(2.0)));
  CHECK_FALSE(diag.contains_direction(v2(1, -1) / std::sqrt(2.0)));
  CHECK(DirectionPatch::cap(v2(3, 4), 0.5).center.isApprox(v2(0.6, 0.8)));
  CHECK_THROWS_AS(DirectionPatch::cap(v2(0, 0), 0.5), InvalidArgument);
  CHECK_THROWS_AS(DirectionPatch::cap(v2(1, 0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(DirectionPatch::axis_band(2, 0.0), InvalidArgument);
  CHECK(cap.resized(0.1).radius == 0.1);
}

TEST_CASE("cone membership matches the direct definition") {
  Rng rng = make_rng(2);
  const std::vector<DirectionPatch> patches = {DirectionPatch::axis_band(2, 0.3), DirectionPatch::axis_band(3, 0.05),
                                               DirectionPatch::cap(v3(0, 0.6, 0.8), 0.4),
                                               DirectionPatch::diagonal_band(3, 0.5), DirectionPatch::diagonal_band(2, 0.2)};
  for (const auto& w : patches) {
    for (int t = 0; t < 20000; ++t) {
      Vec x = random_normal_vector(rng, w.dimension) * 3.0;
      if (w.kind == PatchKind::DiagonalBand && t % 2) x = x.cwiseAbs();
      if (w.kind == PatchKind::ShearletAxisBand && t % 2) x[0] = std::abs(x[0]) * 4;
      REQUIRE(cone_contains(w, 1.5, x) == in_cone(w, 1.5, x));
    }
  }
  CHECK_FALSE(cone_contains(DirectionPatch::axis_band(2, 0.3), 0.0, v2(0, 0)));
}

TEST_CASE("patch geometry helpers bound the patch") {
  Rng rng = make_rng(4);
  for (const auto& w : {DirectionPatch::axis_band(3, 0.3), DirectionPatch::cap(v3(0, 0.6, 0.8), 0.4),
                        DirectionPatch::diagonal_band(3, 0.5)}) {
    Vec lo, hi;
    w.coordinate_bounds(lo, hi);
    const double half = w.enclosing_half_angle();
    int inside = 0;
    for (int t = 0; t < 50000; ++t) {
      const Vec u = random_unit_vector(rng, 3);
      if (!w.contains_direction(u)) continue;
      ++inside;
      for (int i = 0; i < 3; ++i) REQUIRE((u[i] >= lo[i] - 1e-12 && u[i] <= hi[i] + 1e-12));
      REQUIRE(std::acos(std::clamp(u.dot(w.axis()), -1.0, 1.0)) <= half + 1e-12);
    }
    CHECK(inside > 100);
    CHECK(w.contains_direction(w.axis()));
  }
  CHECK(DirectionPatch::axis_band(2, 0.3).convex_cone());
  CHECK(DirectionPatch::cap(v2(1, 0), 0.5).convex_cone());
}

TEST_CASE("window membership and extremal quantities") {
  const FrequencyWindow ball = FrequencyWindow::ball(v2(1.5, 0), 0.5);
  CHECK(ball.contains(v2(1.9, 0.1)));
  CHECK_FALSE(ball.contains(v2(2.0, 0.0)));  // open
  const FrequencyWindow sb = FrequencyWindow::shearlet_box(2);
  CHECK(sb.contains(v2(1.5, 0.9)));
  CHECK_FALSE(sb.contains(v2(0.9, 0.0)));
  const FrequencyWindow sector = FrequencyWindow::annulus_sector(0.8, 1.25, DirectionPatch::diagonal_band(2, 0.25));
  CHECK(sector.contains(v2(0.7, 0.7)));
  CHECK_FALSE(sector.contains(v2(0.5, 0.5)));
  CHECK_THROWS_AS(FrequencyWindow::box(v2(1, 1), v2(0, 2)), InvalidArgument);

  Rng rng = make_rng(9);
  for (const auto& v : {ball, sb, sector, FrequencyWindow::box(v2(1, -2), v2(2, 3)),
                        FrequencyWindow::shearlet_box(3), FrequencyWindow::ball(v3(0, 0, 2), 1.0)}) {
    const int d = v.dimension;
    Vec lo, hi;
    v.bounding_box(lo, hi);
    // Sample a box three times larger: nothing outside the bounding box may be inside V.
    const Vec c = 0.5 * (lo + hi), half = 1.5 * (hi - lo);
    double nmin = 1e300, nmax = 0, hits = 0;
    const int n = 200000;
    for (int t = 0; t < n; ++t) {
      Vec p(d);
      for (int i = 0; i < d; ++i) p[i] = uniform(rng, c[i] - half[i], c[i] + half[i]);
      if (!v.contains(p)) continue;
      ++hits;
      for (int i = 0; i < d; ++i) REQUIRE((p[i] >= lo[i] && p[i] <= hi[i]));
      REQUIRE((p - v.interior_point()).norm() <= v.enclosing_radius() + 1e-12);
      nmin = std::min(nmin, p.norm());
      nmax = std::max(nmax, p.norm());
    }
    CHECK(v.contains(v.interior_point()));
    CHECK(nmin >= v.min_norm() - 1e-12);
    CHECK(nmax <= v.max_norm() + 1e-12);
    CHECK(nmin - v.min_norm() < 0.1);
    CHECK(v.max_norm() - nmax < 0.1);
    const double box_vol = (2 * half).prod();
    const double mc = box_vol * hits / n, se = box_vol * std::sqrt(hits) / n;
    CHECK(std::abs(mc - v.volume()) < 4 * se + 1e-3 * v.volume());
  }
}

TEST_CASE("window sampling stays in the window") {
  Rng rng = make_rng(12);
  const FrequencyWindow sector = FrequencyWindow::annulus_sector(1, 2, DirectionPatch::cap(v2(0, 1), 0.3));
  for (int t = 0; t < 1000; ++t) REQUIRE(sector.contains(sector.sample(rng)));
}

TEST_CASE("K_i and K_o predicates agree with a sampling oracle") {
  struct Setup {
    GroupPtr g;
    DirectionPatch w;
    FrequencyWindow v;
    double R;
  };
  const std::vector<Setup> setups = {
      {make(GroupKind::Shearlet, 2, {0.5}), DirectionPatch::axis_band(2, 0.3), FrequencyWindow::shearlet_box(2), 10},
      {make(GroupKind::Similitude, 2), DirectionPatch::cap(v2(1, 0), 0.5), FrequencyWindow::ball(v2(1.5, 0), 0.5), 2},
      {make(GroupKind::Diagonal, 2), DirectionPatch::diagonal_band(2, 0.5),
       FrequencyWindow::annulus_sector(0.8, 1.25, DirectionPatch::diagonal_band(2, 0.25)), 2},
      {make(GroupKind::Shearlet, 3, {0.5, 0.5}), DirectionPatch::axis_band(3, 0.3), FrequencyWindow::shearlet_box(3), 5},
  };
  Rng rng = make_rng(31);
  for (const auto& s : setups) {
    const int d = s.g->dimension();
    Vec lo, hi;
    s.v.bounding_box(lo, hi);
    const auto pts = points_in(s.v, lo, hi, 1500, rng);
    int ki_yes = 0, ko_yes = 0, ko_no = 0;
    for (int t = 0; t < 400; ++t) {
      const GroupElement h = s.g->random_element(rng, 1e-3, 1.0);
      int hit = 0, miss = 0;
      for (const Vec& p : pts) (in_cone(s.w, s.R, h.inv_transpose * p) ? hit : miss)++;
      const Verdict ki = k_i_contains(h, s.w, s.v, s.R);
      const Verdict ko = k_o_contains(h, s.w, s.v, s.R);
      if (miss > 0) REQUIRE_FALSE(ki.passes());
      if (ki.is_true()) ++ki_yes;
      if (hit > 0) REQUIRE_FALSE(ko.is_false());
      if (ko.is_true()) ++ko_yes;
      if (ko.is_false()) ++ko_no;
      if (ki.is_true()) REQUIRE_FALSE(ko.is_false());
      if (ko.is_true()) {
        auto q = find_hitting_point(h, s.w, s.v, s.R);
        REQUIRE(q);
        CHECK(in_cone(s.w, s.R, h.inv_transpose * *q));
      }
      if (!ki.passes()) {
        auto q = find_violating_point(h, s.w, s.v, s.R);
        if (q) CHECK_FALSE(in_cone(s.w, s.R, h.inv_transpose * *q));
      }
    }
    CAPTURE(d);
    CHECK(ko_yes > 0);
    CHECK(ko_no > 0);
    (void)ki_yes;
  }
}

TEST_CASE("K_i accepts the canonical fine-scale element of the shearlet group") {
  auto g = make(GroupKind::Shearlet, 2, {0.5});
  const GroupElement h = g->canonical_element(v2(1, 0), 1e-4);
  CHECK(k_i_contains(h, DirectionPatch::axis_band(2, 0.3), FrequencyWindow::shearlet_box(2), 10).is_true());
  // Coarse scale: |h^-T xi| < 10, so not even K_o.
  const GroupElement c = g->canonical_element(v2(1, 0), 0.5);
  CHECK(k_o_contains(c, DirectionPatch::axis_band(2, 0.3), FrequencyWindow::shearlet_box(2), 10).is_false());
}

TEST_CASE("windows must lie in the open orbit") {
  auto she = make(GroupKind::Shearlet, 2, {0.5});
  CHECK_NOTHROW(check_window_in_orbit(*she, FrequencyWindow::shearlet_box(2)));
  CHECK_THROWS_AS(check_window_in_orbit(*she, FrequencyWindow::ball(v2(0, 1), 0.5)), DomainError);
  auto dia = make(GroupKind::Diagonal, 2);
  CHECK_THROWS_AS(check_window_in_orbit(*dia, FrequencyWindow::box(v2(-1, 1), v2(1, 2))), DomainError);
  CHECK_NOTHROW(check_window_in_orbit(*dia, FrequencyWindow::box(v2(1, 1), v2(2, 2))));
  auto sim = make(GroupKind::Similitude, 2);
  CHECK_THROWS_AS(check_window_in_orbit(*sim, FrequencyWindow::ball(v2(0.2, 0), 0.5)), DomainError);
}
