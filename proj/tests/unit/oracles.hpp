// Independent reference computations shared by the unit tests. Nothing here
// calls into the library except for plain data types.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
constexpr double pi = 3.14159265358979323846;

inline Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

/// Spectral norm as sqrt of the largest eigenvalue of M^T M.
inline double spectral_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m.transpose() * m);
  return std::sqrt(es.eigenvalues().maxCoeff());
}

inline Mat rot2(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

/// Shearlet dilation for d = 2 written out by hand: [[a, b], [0, a^c]].
inline Mat shearlet2(double a, double b, double c) {
  Mat m(2, 2);
  m << a, b, 0.0, std::pow(a, c);
  return m;
}

/// The bump exp(1 - 1/(1 - t^2)).
inline double bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

/// Adaptive Simpson on [a, b] (tolerance per panel).
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12, int depth = 40) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int left) -> double {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double flm = f(lm), frm = f(rm);
    const double l = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double r = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (left <= 0 || std::abs(l + r - whole) <= 15.0 * tol) return l + r + (l + r - whole) / 15.0;
    return rec(lo, mid, flo, flm, fmid, l, left - 1) + rec(mid, hi, fmid, frm, fhi, r, left - 1);
  };
  // Fixed panels first so that oscillation cannot fool the first error test.
  const int panels = 64;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + (b - a) * k / panels, hi = a + (b - a) * (k + 1) / panels;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    total += rec(lo, hi, fa, fm, fb, (hi - lo) / 6.0 * (fa + 4.0 * fm + fb), depth);
  }
  return total;
}

/// Midpoint rule of f over [lo, hi]^2 on an n x n grid.
inline double midpoint2(const std::function<double(double, double)>& f, Vec lo, Vec hi, int n) {
  const double hx = (hi[0] - lo[0]) / n, hy = (hi[1] - lo[1]) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += f(lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy);
  return s * hx * hy;
}

/// Least-squares slope of y on x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

/// Central-difference Jacobian determinant of a map R^n -> R^n.
inline double jacobian_det(const std::function<Vec(const Vec&)>& f, const Vec& t, double h = 1e-6) {
  const int n = static_cast<int>(t.size());
  Mat j(n, n);
  for (int k = 0; k < n; ++k) {
    Vec tp = t, tm = t;
    tp[k] += h;
    tm[k] -= h;
    j.col(k) = (f(tp) - f(tm)) / (2 * h);
  }
  return j.determinant();
}

}  // namespace oracle
