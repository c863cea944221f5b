#pragma once

#include <complex>
#include <vector>

#include "wavefront/common.hpp"

namespace wf {

using cplx = std::complex<double>;

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Supported orders: 8, 12, 16, 20, 24, 32.
const GaussRule& gauss_rule(int n);

/// Composite Gauss rule on [a, b] with `panels` equal panels.
void composite_rule(double a, double b, int panels, const GaussRule& rule, std::vector<double>& x,
                    std::vector<double>& w);

/// The C-infinity bump exp(1 - 1/(1 - t^2)) on (-1, 1), zero elsewhere.
double bump(double t);

/// F(omega) = int_{-1}^{1} bump(t) exp(2 pi i omega t) dt. Real and even.
/// Tabulated once (spectrally accurate trapezoid rule through an FFT) and
/// interpolated; absolute error below bump_ft_abs_error().
double bump_ft(double omega);
double bump_ft_abs_error();
/// int bump = F(0).
double bump_integral();

/// Fourier transform at |z| = rho of the radial function f(|x|) = bump(|x|)
/// on R^n, i.e. int_{B_1} bump(|x|) exp(2 pi i <z, x>) dx. n >= 1.
double radial_bump_ft(int n, double rho);

/// Lebesgue measure of the unit sphere S^{n-1}.
double unit_sphere_area(int n);

}  // namespace wf
