#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "wavefront/quadrature.hpp"

using namespace wf;

TEST_CASE("Gauss rules integrate polynomials up to degree 2n-1 exactly") {
  for (int n : {8, 12, 16, 20, 24, 32}) {
    const GaussRule& r = gauss_rule(n);
    REQUIRE(r.x.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += r.w[i] * std::pow(r.x[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
  CHECK_THROWS_AS(gauss_rule(7), InvalidArgument);
}

TEST_CASE("composite rule on an interval") {
  std::vector<double> x, w;
  composite_rule(0.0, 3.0, 5, gauss_rule(8), x, w);
  CHECK(x.size() == 40);
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::exp(x[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("bump function") {
  CHECK(bump(0.0) == doctest::Approx(1.0));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.2) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
}

TEST_CASE("bump Fourier transform against adaptive Simpson") {
  CHECK(bump_integral() == doctest::Approx(oracle::simpson(oracle::bump, -1, 1)).epsilon(1e-12));
  for (double om : {0.0, 0.37, 1.0, 2.5, 5.3, 11.0, 23.7}) {
    const double ref = oracle::simpson([om](double t) { return oracle::bump(t) * std::cos(2 * oracle::pi * om * t); },
                                       -1, 1, 1e-14);
    CHECK(std::abs(bump_ft(om) - ref) <= bump_ft_abs_error() + 1e-12);
    CHECK(bump_ft(-om) == bump_ft(om));
  }
  CHECK(bump_ft_abs_error() < 1e-12);
}

TEST_CASE("radial bump transform against 1d integrals") {
  for (double rho : {0.0, 0.4, 1.3, 4.0}) {
    const double k = 2 * oracle::pi * rho;
    // n = 2: 2 pi int bump(r) J0(k r) r dr
    const double r2 = 2 * oracle::pi *
                      oracle::simpson([k](double r) { return oracle::bump(r) * std::cyl_bessel_j(0.0, k * r) * r; }, 0, 1, 1e-16);
    CHECK(std::abs(radial_bump_ft(2, rho) - r2) < 1e-12);
    // n = 3: 4 pi int bump(r) sinc(k r) r^2 dr
    const double r3 = 4 * oracle::pi * oracle::simpson(
                                           [k](double r) {
                                             const double s = k * r == 0 ? 1.0 : std::sin(k * r) / (k * r);
                                             return oracle::bump(r) * s * r * r;
                                           },
                                           0, 1, 1e-16);
    CHECK(std::abs(radial_bump_ft(3, rho) - r3) < 1e-12);
    CHECK(radial_bump_ft(1, rho) == doctest::Approx(bump_ft(rho)).epsilon(1e-12));
  }
}

TEST_CASE("unit sphere areas") {
  CHECK(unit_sphere_area(1) == doctest::Approx(2.0));
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * oracle::pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * oracle::pi));
  CHECK(unit_sphere_area(4) == doctest::Approx(2 * oracle::pi * oracle::pi));
}
