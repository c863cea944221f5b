#include "wavefront/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

namespace wf {

namespace {

template <int N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& ax = G::abscissa();
  const auto& wt = G::weights();
  GaussRule r;
  // Boost stores the non-negative half; N is even here so 0 is not a node.
  for (std::size_t i = ax.size(); i-- > 0;) {
    r.x.push_back(-ax[i]);
    r.w.push_back(wt[i]);
  }
  for (std::size_t i = 0; i < ax.size(); ++i) {
    r.x.push_back(ax[i]);
    r.w.push_back(wt[i]);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static const GaussRule r8 = make_rule<8>();
  static const GaussRule r12 = make_rule<12>();
  static const GaussRule r16 = make_rule<16>();
  static const GaussRule r20 = make_rule<20>();
  static const GaussRule r24 = make_rule<24>();
  static const GaussRule r32 = make_rule<32>();
  switch (n) {
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    case 24: return r24;
    case 32: return r32;
    default: throw InvalidArgument("unsupported Gauss rule order");
  }
}

void composite_rule(double a, double b, int panels, const GaussRule& rule, std::vector<double>& x,
                    std::vector<double>& w) {
  x.clear();
  w.clear();
  if (panels < 1) throw InvalidArgument("composite_rule needs at least one panel");
  const std::size_t n = rule.x.size();
  x.reserve(n * panels);
  w.reserve(n * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < n; ++k) {
      x.push_back(mid + 0.5 * h * rule.x[k]);
      w.push_back(0.5 * h * rule.w[k]);
    }
  }
}

double bump(double t) {
  const double s = 1.0 - t * t;
  if (!(s > 0.0)) return 0.0;
  return std::exp(1.0 - 1.0 / s);
}

namespace {

constexpr int kTablePerUnit = 64;       // omega spacing 1/64
constexpr double kTableMax = 400.0;     // beyond this F is far below 1e-30
constexpr int kSamplesPerUnit = 2048;   // t spacing of the trapezoid rule
constexpr int kInterpPoints = 10;

struct BumpTable {
  std::vector<double> values;  // F(k / kTablePerUnit), k = 0..K
};

const BumpTable& bump_table() {
  static BumpTable table;
  static std::once_flag once;
  std::call_once(once, [] {
    // Trapezoid rule with period L = kTablePerUnit: the integrand is smooth and
    // compactly supported, so aliasing is governed by F(kSamplesPerUnit - 400).
    const int n = kTablePerUnit * kSamplesPerUnit;
    const double dt = 1.0 / kSamplesPerUnit;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    for (int j = 0; j < n; ++j) {
      buf[j][0] = 0.0;
      buf[j][1] = 0.0;
    }
    for (int j = 0; j < kSamplesPerUnit; ++j) {
      const double b = bump(j * dt);
      buf[j][0] = b;
      if (j > 0) buf[n - j][0] = b;
    }
    fftw_execute(plan);
    const int kmax = static_cast<int>(kTableMax * kTablePerUnit) + kInterpPoints;
    table.values.resize(kmax + 1);
    for (int k = 0; k <= kmax; ++k) table.values[k] = dt * buf[k][0];
    fftw_destroy_plan(plan);
    fftw_free(buf);
  });
  return table;
}

double table_at(const BumpTable& t, int k) { return t.values[static_cast<std::size_t>(k < 0 ? -k : k)]; }

}  // namespace

double bump_ft(double omega) {
  const double w = std::abs(omega);
  if (w > kTableMax) return 0.0;
  const BumpTable& t = bump_table();
  const double u = w * kTablePerUnit;
  const int base = static_cast<int>(std::floor(u)) - kInterpPoints / 2 + 1;
  // Lagrange interpolation on the uniform stencil base .. base + 9.
  double acc = 0.0;
  for (int i = 0; i < kInterpPoints; ++i) {
    double li = 1.0;
    const double xi = base + i;
    if (u == xi) return table_at(t, base + i);
    for (int j = 0; j < kInterpPoints; ++j) {
      if (j != i) li *= (u - (base + j)) / (xi - (base + j));
    }
    acc += li * table_at(t, base + i);
  }
  return acc;
}

double bump_ft_abs_error() { return 1e-15; }

double bump_integral() { return bump_table().values[0]; }

double unit_sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / boost::math::tgamma(0.5 * n);
}

double radial_bump_ft(int n, double rho) {
  if (n < 1) throw InvalidArgument("radial_bump_ft needs n >= 1");
  if (n == 1) return bump_ft(rho);
  const GaussRule& rule = gauss_rule(16);
  const int panels = 24 + static_cast<int>(std::ceil(std::abs(rho)));
  std::vector<double> x, w;
  composite_rule(0.0, 1.0, panels, rule, x, w);
  double acc = 0.0;
  if (rho == 0.0) {
    for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * bump(x[k]) * std::pow(x[k], n - 1);
    return unit_sphere_area(n) * acc;
  }
  const double nu = 0.5 * n - 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += w[k] * bump(x[k]) * std::cyl_bessel_j(nu, kTwoPi * rho * x[k]) * std::pow(x[k], 0.5 * n);
  }
  return kTwoPi * std::pow(rho, 1.0 - 0.5 * n) * acc;
}

}  // namespace wf
