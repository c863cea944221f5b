#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/detector.hpp"

using namespace wf;
using oracle::v2;

namespace {

GroupPtr shearlet(double c = 0.5) {
  DilationGroupSpec s;
  s.kind = GroupKind::Shearlet;
  s.dimension = 2;
  s.anisotropy = {c};
  return build_group(s);
}

const BandlimitedWavelet& psi() {
  static const BandlimitedWavelet p = normalize(*shearlet(), BandlimitedWavelet(FrequencyWindow::shearlet_box(2)));
  return p;
}

DetectorConfig fine_cfg() {
  DetectorConfig c;
  c.offset_spacing = 1.0 / 128;
  c.permuted_pass = true;
  return c;
}

// Synthetic ladder samples |W| = A ||h||^p at norms rho^k.
DecayReport power_law(double p, int n = 16, double rho = 0.5, double floor = 0.0) {
  DecayReport r;
  for (int k = 0; k < n; ++k) {
    DecaySample s;
    s.norm = std::pow(rho, k);
    s.coeff = 3.0 * std::pow(s.norm, p);
    s.floor = floor;
    s.below_floor = s.coeff <= floor;
    r.samples.push_back(s);
  }
  return r;
}

}  // namespace

TEST_CASE("decay exponent of exact power laws") {
  std::vector<std::pair<double, double>> s;
  for (int k = 0; k < 8; ++k) s.emplace_back(std::log(std::pow(0.5, k)), std::log(2.0) + 2.5 * std::log(std::pow(0.5, k)));
  const SlopeFit f = decay_exponent(s);
  CHECK(f.slope == doctest::Approx(2.5));
  CHECK(f.intercept == doctest::Approx(std::log(2.0)));
  CHECK(f.residual < 1e-12);
  CHECK(f.used == 8);
  CHECK_THROWS_AS(decay_exponent({s.begin(), s.begin() + 2}), InvalidArgument);

  // Against the independent least-squares slope on noisy data.
  Rng rng = make_rng(1);
  std::vector<double> x, y;
  s.clear();
  for (int k = 0; k < 20; ++k) {
    x.push_back(-0.3 * k);
    y.push_back(1.7 * x.back() + 0.1 * uniform(rng, -1, 1));
    s.emplace_back(x.back(), y.back());
  }
  CHECK(decay_exponent(s).slope == doctest::Approx(oracle::slope(x, y)).epsilon(1e-12));
}

TEST_CASE("classification of synthetic ladders") {
  const DetectorConfig cfg;
  SUBCASE("slow decay is singular") {
    DecayReport r = power_law(-0.5);
    classify_samples(r, cfg);
    CHECK(r.verdict == Classification::Singular);
    CHECK(r.slope == doctest::Approx(-0.5));
  }
  SUBCASE("fast polynomial decay is regular") {
    DecayReport r = power_law(6.0);
    classify_samples(r, cfg);
    CHECK(r.verdict == Classification::Regular);
  }
  SUBCASE("intermediate decay is inconclusive") {
    DecayReport r = power_law(2.5);
    classify_samples(r, cfg);
    CHECK(r.verdict == Classification::Inconclusive);
  }
  SUBCASE("finest quarter below the floor is regular") {
    DecayReport r = power_law(3.0, 16, 0.5, 1e-6);
    classify_samples(r, cfg);
    CHECK(r.floor_hit);
    CHECK(r.verdict == Classification::Regular);
  }
  SUBCASE("super-polynomial decay is regular despite the curvature") {
    DecayReport r;
    for (int k = 0; k < 16; ++k) {
      DecaySample s;
      s.norm = std::pow(0.7, k);
      s.coeff = std::exp(-1.0 / std::sqrt(s.norm));
      r.samples.push_back(s);
    }
    classify_samples(r, cfg);
    CHECK(r.verdict == Classification::Regular);
  }
  SUBCASE("too few usable samples") {
    DecayReport r = power_law(1.0, 2);
    classify_samples(r, cfg);
    CHECK(r.verdict == Classification::Inconclusive);
  }
}

TEST_CASE("neighbourhood offsets and directions") {
  const auto o = neighborhood_offsets(2, 0.1, 5);
  CHECK(o.size() == 25);
  std::set<std::pair<long, long>> seen;
  for (const auto& v : o) {
    CHECK(std::abs(v[0]) <= 0.2 + 1e-12);
    seen.insert({std::lround(v[0] * 10), std::lround(v[1] * 10)});
  }
  CHECK(seen.size() == 25);
  CHECK(neighborhood_offsets(3, 0.1, 3).size() == 27);

  const auto d = planar_directions(8);
  REQUIRE(d.size() == 8);
  CHECK(d[2][0] == 0.0);
  CHECK(d[2][1] == 1.0);
  CHECK(d[1].isApprox(v2(1, 1) / std::sqrt(2.0)));
  for (const auto& u : d) CHECK(u.norm() == doctest::Approx(1.0));
}

TEST_CASE("probe ladders are geometric in norm and lie in K_o") {
  auto g = shearlet();
  const Vec xi = v2(std::cos(0.3), std::sin(0.3));
  const DirectionPatch w = DirectionPatch::cap(xi, 0.1);
  const ProbeLadder l = build_probe_ladder(*g, xi, FrequencyWindow::shearlet_box(2), w, 2.0, 0.5, 16, {Vec::Zero(2)});
  REQUIRE(l.elements.size() >= 10);
  for (std::size_t k = 0; k < l.elements.size(); ++k) {
    const GroupElement& h = l.elements[k];
    CHECK(oracle::spectral_norm(h.matrix) <= 1.0 + 1e-9);
    CHECK_FALSE(k_o_contains(h, w, FrequencyWindow::shearlet_box(2), 2.0).is_false());
    const bool ki = k_i_contains(h, w, FrequencyWindow::shearlet_box(2), 2.0).passes();
    CHECK((l.tiers[k] == Tier::Ki) == ki);
    if (k > 0) {
      CHECK(h.op_norm / l.elements[k - 1].op_norm == doctest::Approx(0.5).epsilon(1e-6));
    }
    // h^-T maps the orbit base point along xi.
    CHECK((h.inv_transpose * v2(1, 0)).normalized().dot(xi) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(build_probe_ladder(*g, v2(0, 1), FrequencyWindow::shearlet_box(2), DirectionPatch::cap(v2(0, 1), 0.1),
                                     2.0, 0.5, 16, {Vec::Zero(2)}),
                  DomainError);
}

TEST_CASE("hyperplane: singular across the line with the scaling exponent") {
  // On the line x_1 = 0 with h = diag(a, a^c): W(0, h) is proportional to
  // a^{(1+c)/2 - 1} and ||h|| = a^c, so the log-log slope is (c - 1) / (2c).
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::hyperplane(v2(1, 0), v2(0, 0));
  const DecayReport r = classify_point(u, psi(), *g, v2(0, 0), v2(1, 0), fine_cfg());
  CHECK(r.verdict == Classification::Singular);
  CHECK(r.slope == doctest::Approx(-0.5).epsilon(0.02));
  const DecayReport back = classify_point(u, psi(), *g, v2(0, 0.4), v2(-1, 0), fine_cfg());
  CHECK(back.verdict == Classification::Singular);
  CHECK(classify_point(u, psi(), *g, v2(0, 0), v2(0.6, 0.8), fine_cfg()).verdict == Classification::Regular);
  CHECK(classify_point(u, psi(), *g, v2(0.25, 0), v2(1, 0), fine_cfg()).verdict == Classification::Regular);
}

TEST_CASE("point mass: every direction is singular at the point") {
  // W(x0, h) = |det h|^{-1/2} psi(0): slope -(1 + c) / (2c) = -1.5.
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::point_mass(v2(0, 0));
  for (const Vec& xi : {v2(1, 0), v2(0.6, -0.8), v2(0, 1)}) {
    const DecayReport r = classify_point(u, psi(), *g, v2(0, 0), xi, fine_cfg());
    CHECK(r.verdict == Classification::Singular);
    CHECK(r.slope == doctest::Approx(-1.5).epsilon(0.02));
    CHECK(r.permuted == (xi[0] == 0.0));
  }
  CHECK(classify_point(u, psi(), *g, v2(0.3, 0.3), v2(1, 0), fine_cfg()).verdict == Classification::Regular);
}

TEST_CASE("orbit-excluded directions need the permuted pass") {
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::hyperplane(v2(0, 1), v2(0, 0));
  DetectorConfig cfg = fine_cfg();
  cfg.permuted_pass = false;
  const DecayReport plain = classify_point(u, psi(), *g, v2(0, 0), v2(0, 1), cfg);
  CHECK(plain.verdict == Classification::Unresolvable);
  cfg.permuted_pass = true;
  const DecayReport perm = classify_point(u, psi(), *g, v2(0, 0), v2(0, 1), cfg);
  CHECK(perm.permuted);
  CHECK(perm.verdict == Classification::Singular);
}

TEST_CASE("smooth objects are regular everywhere") {
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::gaussian(v2(0, 0), Mat::Identity(2, 2) * 0.01);
  for (const Vec& x : {v2(0, 0), v2(0.1, -0.05)})
    for (const Vec& xi : {v2(1, 0), v2(0, -1), v2(-0.6, 0.8)})
      CHECK(classify_point(u, psi(), *g, x, xi, fine_cfg()).verdict == Classification::Regular);
}

TEST_CASE("scans are independent of the worker count") {
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::hyperplane(v2(1, 0), v2(0, 0));
  std::vector<Vec> pts;
  for (int i = -2; i <= 2; ++i)
    for (int j = -1; j <= 1; ++j) pts.push_back(v2(i / 16.0, j / 16.0));
  const auto dirs = planar_directions(8);
  const ScanResult a = wavefront_scan(u, psi(), *g, pts, dirs, fine_cfg(), 1);
  const ScanResult b = wavefront_scan(u, psi(), *g, pts, dirs, fine_cfg(), 4);
  REQUIRE(a.verdicts.size() == pts.size() * dirs.size());
  CHECK(a.verdicts == b.verdicts);
  CHECK(a.slopes == b.slopes);
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (std::size_t q = 0; q < dirs.size(); ++q) {
      const bool on_line = pts[p][0] == 0.0;
      const bool normal = q == 0 || q == 4;
      CAPTURE(p);
      CAPTURE(q);
      CHECK((a.at(p, q) == Classification::Singular) == (on_line && normal));
    }
}

TEST_CASE("grid signals go through the FFT path") {
  auto g = shearlet();
  const double sp = 1.0 / 64;
  const auto grid = std::make_shared<const GridSignal>(
      synthesize_signal(AnalysedObject::hyperplane(v2(1, 0), v2(0, 0)), {256, 256}, sp, v2(-2, -2)));
  const AnalysedObject u = AnalysedObject::grid_signal(grid);
  DetectorConfig cfg = fine_cfg();
  cfg.offset_spacing = sp;
  cfg.offsets_per_axis = 3;
  const DecayReport on = classify_point(u, psi(), *g, v2(0, 0), v2(1, 0), cfg);
  CHECK(on.verdict == Classification::Singular);
  const DecayReport off = classify_point(u, psi(), *g, v2(0, 0), v2(0.6, 0.8), cfg);
  CHECK(off.verdict != Classification::Singular);
  // Elements finer than the grid resolves are dropped.
  CHECK(on.samples.size() < static_cast<std::size_t>(cfg.depth));
}

TEST_CASE("report writers") {
  auto g = shearlet();
  const AnalysedObject u = AnalysedObject::point_mass(v2(0, 0));
  const auto dir = std::filesystem::temp_directory_path() / "wavefront_test_det";
  std::filesystem::create_directories(dir);
  const ScanResult s = wavefront_scan(u, psi(), *g, {v2(0, 0), v2(0.5, 0)}, planar_directions(4), fine_cfg(), 1);
  write_scan_csv((dir / "s.csv").string(), s, "hdr");
  write_scan_matrix((dir / "m.txt").string(), s, "hdr");
  std::ifstream csv(dir / "s.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "# hdr");
  int rows = 0;
  std::getline(csv, line);
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 8);
  std::ifstream m(dir / "m.txt");
  std::vector<std::string> lines;
  while (std::getline(m, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "-1 -1 -1 -1");
  CHECK(lines[1] == "1 1 1 1");
  CHECK(verdict_code(Classification::Unresolvable) == 2);
  std::filesystem::remove_all(dir);
}
