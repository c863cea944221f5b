#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/transform.hpp"

using namespace wf;
using oracle::v2;
using cd = std::complex<double>;

namespace {

GroupPtr shearlet() {
  DilationGroupSpec s;
  s.kind = GroupKind::Shearlet;
  s.dimension = 2;
  s.anisotropy = {0.5};
  return build_group(s);
}

// |det h|^{-1/2} int psi-hat(eta) u-hat(h^{-T} eta) e^{2 pi i <y, h^{-T} eta>} d eta,
// the defining integral after eta = h^T xi.
cd frequency_oracle(const BandlimitedWavelet& psi, const GroupElement& h, const Vec& y,
                    const std::function<cd(const Vec&)>& uhat, int n = 500) {
  Vec lo, hi;
  psi.support().bounding_box(lo, hi);
  const double hx = (hi[0] - lo[0]) / n, hy = (hi[1] - lo[1]) / n;
  cd s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec eta = v2(lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy);
      const double p = psi.hat(eta);
      if (p == 0.0) continue;
      const Vec xi = h.inv_transpose * eta;
      s += p * uhat(xi) * std::exp(cd(0, 2 * oracle::pi * y.dot(xi)));
    }
  return s * hx * hy / std::sqrt(std::abs(h.matrix.determinant()));
}

}  // namespace

TEST_CASE("point mass coefficients match the frequency integral") {
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2), 3.0);
  const Vec x0 = v2(0.1, -0.2);
  const AnalysedObject u = AnalysedObject::point_mass(x0);
  Rng rng = make_rng(5);
  for (int t = 0; t < 10; ++t) {
    const GroupElement h = g->random_element(rng, 0.05, 1.0);
    const Vec y = x0 + random_normal_vector(rng, 2) * 0.3 * h.op_norm;
    const cd ref = frequency_oracle(psi, h, y, [&](const Vec& xi) { return std::exp(cd(0, -2 * oracle::pi * x0.dot(xi))); });
    const Valued w = coefficient_analytic(u, psi, y, h);
    CHECK(std::abs(w.value - ref) < 1e-8 * (1 + std::abs(ref)));
  }
}

TEST_CASE("Gaussian coefficients match the frequency integral") {
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2));
  Mat cov(2, 2);
  cov << 0.02, 0.005, 0.005, 0.01;
  const Vec c = v2(0.2, 0.1);
  const AnalysedObject u = AnalysedObject::gaussian(c, cov);
  auto uhat = [&](const Vec& xi) {
    return std::exp(cd(-2 * oracle::pi * oracle::pi * xi.dot(cov * xi), -2 * oracle::pi * c.dot(xi)));
  };
  for (const auto& v : {v2(0.3, 0.0), v2(1.0, 0.5), v2(3.0, -1.0)}) CHECK(std::abs(u.gaussian_hat(v) - uhat(v)) < 1e-14);
  Rng rng = make_rng(6);
  for (int t = 0; t < 8; ++t) {
    const GroupElement h = g->random_element(rng, 0.05, 1.0);
    const Vec y = c + random_normal_vector(rng, 2) * 0.2;
    const cd ref = frequency_oracle(psi, h, y, uhat);
    const Valued w = coefficient_analytic(u, psi, y, h);
    CHECK(std::abs(w.value - ref) < 1e-8 + 1e-7 * std::abs(ref));
    CHECK(w.error < 1e-6 + 1e-3 * std::abs(w.value));
  }
}

TEST_CASE("hyperplane coefficients match the line integral") {
  // u-hat is e^{-2 pi i t <p, gamma>} on the line xi = t gamma (|gamma| = 1).
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2));
  const double th = 0.3;
  const Vec gamma = v2(std::cos(th), std::sin(th));
  const Vec p = v2(0.05, 0.0);
  const AnalysedObject u = AnalysedObject::hyperplane(gamma, p);
  Rng rng = make_rng(7);
  int nonzero = 0;
  for (int t = 0; t < 20; ++t) {
    const GroupElement h = g->element(shearlet_params(1, std::pow(2.0, -uniform(rng, 1, 6)), {uniform(rng, -0.5, 0.5)}));
    const Vec y = random_normal_vector(rng, 2) * 0.1;
    const double dh = std::sqrt(std::abs(h.matrix.determinant()));
    auto f = [&](double s, bool imag) {
      const cd v = psi.hat(h.matrix.transpose() * (s * gamma)) *
                   std::exp(cd(0, 2 * oracle::pi * s * (y - p).dot(gamma)));
      return imag ? v.imag() : v.real();
    };
    // psi-hat(h^T s gamma) vanishes unless its first coordinate s q lies in (1, 2).
    const double q = (h.matrix.transpose() * gamma)[0];
    const double s0 = std::min(1 / q, 2 / q), s1 = std::max(1 / q, 2 / q);
    const cd ref = dh * cd(oracle::simpson([&](double s) { return f(s, false); }, s0, s1, 1e-14),
                           oracle::simpson([&](double s) { return f(s, true); }, s0, s1, 1e-14));
    const Valued w = coefficient_analytic(u, psi, y, h);
    CHECK(std::abs(w.value - ref) < 1e-8 * (1 + std::abs(ref)));
    nonzero += std::abs(ref) > 1e-3;
  }
  CHECK(nonzero > 0);
}

TEST_CASE("coefficient plans reproduce the one-shot path") {
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2));
  const GroupElement h = g->element(shearlet_params(1, 0.01, {0.05}));
  for (const auto& u : {AnalysedObject::point_mass(v2(0, 0)), AnalysedObject::hyperplane(v2(1, 0), v2(0, 0)),
                        AnalysedObject::gaussian(v2(0, 0), Mat::Identity(2, 2) * 0.01)}) {
    CoefficientPlan plan(u, psi, h, 0.5);
    for (const auto& y : {v2(0, 0), v2(0.01, 0.2), v2(-0.3, 0.1), v2(2.0, 0.0)}) {
      const Valued a = plan(y), b = coefficient_analytic(u, psi, y, h);
      CHECK(std::abs(a.value - b.value) <= 1e-12 + 1e-9 * std::abs(b.value) + a.error + b.error);
    }
  }
}

TEST_CASE("FFT path converges to the analytic path as the grid grows") {
  // The grid path is a Riemann sum in frequency with step 1 / L (L the grid
  // length), so the gap closes as L grows.
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2));
  const AnalysedObject u = AnalysedObject::gaussian(v2(0, 0), Mat::Identity(2, 2) * 0.01);
  const GroupElement h = g->element(shearlet_params(1, 0.25, {0.1}));
  double prev = 1e300;
  for (int n : {256, 512, 1024}) {
    const double sp = 1.0 / 32;
    const GridSignal grid = synthesize_signal(u, {n, n}, sp, Vec::Constant(2, -n / 2 * sp));
    const GridTransformer tr(std::make_shared<const GridSignal>(grid));
    const CoefficientField f = tr.field(psi, h);
    REQUIRE(f.values.size() == grid.size());
    double worst = 0;
    for (auto [i, j] : {std::pair{0, 0}, std::pair{3, -2}, std::pair{-5, 4}}) {
      const std::size_t idx = grid.flat_of({n / 2 + i, n / 2 + j});
      const Valued a = coefficient_analytic(u, psi, grid.point(idx), h);
      worst = std::max(worst, std::abs(f.values[idx] - a.value) / std::abs(a.value));
    }
    CAPTURE(n);
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("grid path rejects aliasing elements") {
  auto g = shearlet();
  const BandlimitedWavelet psi(FrequencyWindow::shearlet_box(2));
  const GridSignal grid = synthesize_signal(AnalysedObject::point_mass(v2(0, 0)), {64, 64}, 1.0 / 32, v2(-1, -1));
  const GridTransformer tr(std::make_shared<const GridSignal>(grid));
  CHECK_NOTHROW(tr.field(psi, g->element(shearlet_params(1, 0.25, {0.0}))));
  CHECK_THROWS_AS(tr.field(psi, g->element(shearlet_params(1, 1e-3, {0.0}))), DomainError);
  // DFT bin frequencies are k / (n spacing) with centred k.
  CHECK(tr.frequency(grid.flat_of({1, 0}))[0] == doctest::Approx(0.5));
  CHECK(tr.frequency(grid.flat_of({63, 0}))[0] == doctest::Approx(-0.5));
}

TEST_CASE("grid indexing and synthesis") {
  GridSignal g;
  g.dims = {4, 8};
  g.spacing = 0.5;
  g.origin = v2(-1, -2);
  g.samples.assign(32, 0.0);
  CHECK(g.size() == 32);
  CHECK(g.flat_of({2, 3}) == 19);
  CHECK(g.index_of(19) == std::vector<int>{2, 3});
  CHECK(g.point(19).isApprox(v2(0.0, -0.5)));
  CHECK_NOTHROW(g.validate(true));
  g.dims = {3, 8};
  g.samples.assign(24, 0.0);
  CHECK_THROWS_AS(g.validate(true), InvalidArgument);

  const GridSignal pm = synthesize_signal(AnalysedObject::point_mass(v2(0, 0)), {16, 16}, 0.25, v2(-2, -2));
  double mass = 0;
  for (const auto& s : pm.samples) mass += s.real() * 0.25 * 0.25;
  CHECK(mass == doctest::Approx(1.0));
  const GridSignal ga = synthesize_signal(AnalysedObject::gaussian(v2(0, 0), Mat::Identity(2, 2) * 0.05), {64, 64},
                                          1.0 / 16, v2(-2, -2));
  mass = 0;
  for (const auto& s : ga.samples) mass += s.real() / 256.0;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("grid files round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "wavefront_test_grid";
  std::filesystem::create_directories(dir);
  GridSignal g;
  g.dims = {2, 3};
  g.spacing = 0.125;
  g.origin = v2(0.5, -1);
  g.samples = {cd(1, 2), cd(3, 0), cd(-1, 0.5), cd(0, 0), cd(7, -7), cd(1e-300, 1)};
  const std::string path = (dir / "c.bin").string();
  write_grid(path, g, true);
  const GridSignal r = read_grid(path);
  CHECK(r.dims == g.dims);
  CHECK(r.spacing == g.spacing);
  CHECK(r.origin == g.origin);
  CHECK(r.samples == g.samples);
  write_grid(path, g, false);
  const GridSignal re = read_grid(path);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(re.samples[i] == cd(g.samples[i].real(), 0));
  CHECK(std::filesystem::file_size(path) == 6 * sizeof(double));
  CHECK_THROWS(read_grid((dir / "missing.bin").string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("coordinate permutation of objects") {
  Mat p = Mat::Zero(2, 2);
  p(0, 1) = 1;
  p(1, 0) = 1;
  const AnalysedObject u = AnalysedObject::point_mass(v2(0.3, -0.1)).transformed(p);
  CHECK(u.x0.isApprox(v2(-0.1, 0.3)));
  const AnalysedObject l = AnalysedObject::hyperplane(v2(0, 1), v2(0, 0.2)).transformed(p);
  CHECK(std::abs(l.normal.normalized().dot(v2(1, 0))) == doctest::Approx(1.0));
  CHECK_THROWS_AS(AnalysedObject::gaussian(v2(0, 0), -Mat::Identity(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(AnalysedObject::hyperplane(v2(0, 0), v2(0, 0)), InvalidArgument);
}
