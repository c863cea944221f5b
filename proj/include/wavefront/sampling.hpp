#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavefront/geometry.hpp"
#include "wavefront/group.hpp"

namespace wf {

/// A Monte-Carlo or quadrature estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

/// Coordinates t on a box that cover H_{xi,V} = {h : h^T xi in V}.
///   shearlet    t = (a, eta_2, ..., eta_d)
///   similitude  t = (a, theta) for d = 2; t = (a) plus a random rotation for d >= 3
///   diagonal    t = (a_1, ..., a_d)
/// weight(t) is the Haar density times the Jacobian of t -> chart parameters.
struct StayChart {
  Vec lo, hi;
  std::function<GroupElement(const Vec& t)> element;
  /// h^T xi for the element at t, without building the element.
  std::function<Vec(const Vec& t)> dual_image;
  std::function<double(const Vec& t)> weight;
  /// For similitude with d >= 3 the rotation is not part of t; `draw` then
  /// produces (h^T xi, weight) with E[weight f] = integral of f over the chart.
  std::function<std::pair<Vec, double>(Rng&)> draw;
  bool box_complete = true;  ///< false when draw() must be used
};

StayChart stay_chart(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v);

using DualIntegrand = std::function<double(const Vec& eta)>;

/// Tensor Gauss quadrature of f(h^T xi) * weight over a 2-dimensional stay
/// chart; the error is the difference between two panel resolutions.
Estimate integrate_stay_gl(const StayChart& chart, const DualIntegrand& f, int panels = 12);
/// Plain Monte Carlo over the stay chart.
Estimate integrate_stay_mc(const StayChart& chart, const DualIntegrand& f, long samples, std::uint64_t seed);

/// mu_H(H_{xi,V}).
Estimate stay_measure(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v, long budget,
                      std::uint64_t seed);

struct WeightedElement {
  GroupElement h;
  /// Haar weight: sum over samples of weight * f(h) estimates the integral of
  /// f over the sampled part of K_o.
  double weight = 0.0;
  /// Octave index log2(scale_max / scale), 0 = coarsest.
  int octave = 0;
};

struct KoSamplerOptions {
  int octaves = 18;
  /// Proposals drawn before giving up when too few land in K_o.
  long max_proposals = 50'000'000;
};

/// Chart region containing K_o(W,V,R) down to `octaves` dyadic scales below
/// the largest admissible scale, derived from |h^{-T} xi| > R.
struct KoRegion {
  double scale_max = 0.0;  ///< upper bound of the scale coordinate on K_o
  int octaves = 0;
  struct Proposal {
    GroupElement h;
    double inv_density = 0.0;  ///< Haar density / proposal density
    int octave = 0;
  };
  std::function<Proposal(Rng&)> propose;
};

KoRegion ko_region(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v, double R,
                   int octaves);

/// Haar-weighted rejection samples of K_o(W,V,R); every returned element
/// passes k_o_contains. Deterministic in (seed).
std::vector<WeightedElement> sample_K_o(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v,
                                        double R, long count, std::uint64_t seed, const KoSamplerOptions& opts = {});

/// Normalized surface measure of the cap of half-angle phi on S^{d-1}.
double cap_fraction(int d, double phi);
/// Uniform point of the cap {u : angle(u, axis) < phi}.
Vec sample_in_cap(Rng& rng, const Vec& axis, double phi);

/// Low-dimensional chart used by the Haar-invariance oracle.
struct LocalChart {
  int dim = 0;
  std::function<GroupElement(const Vec&)> element;
  std::function<std::optional<Vec>(const GroupElement&)> coords;
  std::function<double(const Vec&)> density;
};

/// similitude (d = 2): (a, theta); diagonal: (a_i); shearlet: (a, b) on the + component.
LocalChart local_chart(const DilationGroup& group);

struct InvarianceCheck {
  Estimate measure_s;    ///< Haar measure of the chart box S
  Estimate measure_gs;   ///< Haar measure of g0 S
  double z = 0.0;        ///< |difference| / combined standard error
};

/// Left-invariance oracle: compares mu(S) and mu(g0 S) for a chart box S.
InvarianceCheck haar_invariance_check(const DilationGroup& group, const Vec& box_lo, const Vec& box_hi,
                                      const GroupElement& g0, long samples, std::uint64_t seed);

}  // namespace wf
