#pragma once

#include <optional>

#include "wavefront/geometry.hpp"
#include "wavefront/group.hpp"
#include "wavefront/quadrature.hpp"
#include "wavefront/sampling.hpp"

namespace wf {

/// A value together with an absolute error estimate.
struct Valued {
  cplx value;
  double error = 0.0;
};

/// Band-limited wavelet with psi-hat = sqrt(kappa) * profile, where the
/// profile is a tensor/radial product of bump() fitted to the window:
///   ball            bump(|xi - c| / r)
///   box             prod_i bump((2 xi_i - lo_i - hi_i) / (hi_i - lo_i))
///   shearlet box    bump(2 xi_1 - 3) * bump(|xi_perp|)
///   annulus sector  radial bump over (r_min, r_max) times an angular bump on the patch
class BandlimitedWavelet {
public:
  explicit BandlimitedWavelet(FrequencyWindow support, double kappa = 1.0);

  const FrequencyWindow& support() const { return support_; }
  double kappa() const { return kappa_; }
  int dimension() const { return support_.dimension; }
  BandlimitedWavelet with_kappa(double kappa) const;

  /// Unnormalized profile in [0, 1]; exactly 0 outside the window.
  double profile(const Vec& xi) const;
  /// psi-hat(xi) (real).
  double hat(const Vec& xi) const { return amplitude() * profile(xi); }
  double amplitude() const { return std::sqrt(kappa_); }

  /// F(pi(x,h) psi)(xi) = |det h|^{1/2} e^{-2 pi i <x, xi>} psi-hat(h^T xi).
  cplx dilated_hat(const Vec& x, const GroupElement& h, const Vec& xi) const;

  /// psi(z) = int psi-hat(xi) e^{2 pi i <z, xi>} d xi.
  Valued spatial_eval(const Vec& z) const;

  /// int psi-hat = psi(0) (psi-hat >= 0, so this is also its L1 norm).
  double hat_l1() const;

  /// The group the wavelet was normalized for, if any.
  std::optional<DilationGroupSpec> group;

private:
  FrequencyWindow support_;
  double kappa_;
  double profile_l1_ = -1.0;
};

struct AdmissibilityOptions {
  /// Gauss panels per axis for d = 2 (the error is taken against half as many).
  int panels = 12;
  /// Monte-Carlo budget for d >= 3.
  long mc_samples = 100'000;
  std::uint64_t seed = 0xAD;
};

/// int_H |psi-hat(h^T xi)|^2 dh over H_{xi,V}.
Estimate admissibility_integral(const DilationGroup& group, const BandlimitedWavelet& psi, const Vec& xi,
                                const AdmissibilityOptions& opts = {});

/// Rescales kappa so the admissibility integral is 1 at the orbit base point.
BandlimitedWavelet normalize(const DilationGroup& group, const BandlimitedWavelet& psi,
                             const AdmissibilityOptions& opts = {});

/// Normalization tolerance used throughout (admissibility within 1 +- tol).
inline constexpr double kAdmissibilityTol = 1e-3;

}  // namespace wf
