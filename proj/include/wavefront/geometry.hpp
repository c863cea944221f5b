#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavefront/common.hpp"
#include "wavefront/group.hpp"

namespace wf {

enum class PatchKind { SphericalCap, ShearletAxisBand, DiagonalBand };

std::string to_string(PatchKind kind);

/// Relatively open subset W of S^{d-1}.
///   SphericalCap      {u : |u - center| < radius}
///   ShearletAxisBand  {u : |u_1 - 1| < eps}
///   DiagonalBand      {u : 1/(1+eps) < sqrt(d) u_i < 1+eps for all i}
struct DirectionPatch {
  PatchKind kind = PatchKind::SphericalCap;
  int dimension = 2;
  Vec center;
  double radius = 0.0;
  double eps = 0.0;

  static DirectionPatch cap(const Vec& center, double radius);
  static DirectionPatch axis_band(int d, double eps);
  static DirectionPatch diagonal_band(int d, double eps);

  void validate() const;
  /// Membership of a unit vector.
  bool contains_direction(const Vec& u) const;
  /// Same family, size parameter replaced (cap radius or eps).
  DirectionPatch resized(double size) const;
  double size() const { return kind == PatchKind::SphericalCap ? radius : eps; }
  /// Unit vector the patch is built around.
  Vec axis() const;
  /// Half-angle of the smallest cap around axis() that contains the patch.
  double enclosing_half_angle() const;
  /// True when the cone over the patch is convex.
  bool convex_cone() const;
  /// Per-coordinate bounds of u over the patch (interval hull).
  void coordinate_bounds(Vec& lo, Vec& hi) const;
};

struct ConeSpec {
  DirectionPatch patch;
  double R = 0.0;  ///< R = 0 encodes C(W) without a radius cut.
};

/// v in C(W,R).
bool cone_contains(const ConeSpec& cone, const Vec& v);
bool cone_contains(const DirectionPatch& w, double R, const Vec& v);

enum class WindowKind { Ball, Box, ShearletBox, AnnulusSector };

std::string to_string(WindowKind kind);

/// Open, bounded frequency window V.
struct FrequencyWindow {
  WindowKind kind = WindowKind::Ball;
  int dimension = 2;
  Vec center;           // Ball
  double radius = 0.0;  // Ball
  Vec lo, hi;           // Box
  double r_min = 0.0, r_max = 0.0;  // AnnulusSector
  std::optional<DirectionPatch> sector;
  int sample_budget = 256;

  static FrequencyWindow ball(const Vec& center, double radius);
  static FrequencyWindow box(const Vec& lo, const Vec& hi);
  /// (1,2) x B_1(0) in R x R^{d-1}.
  static FrequencyWindow shearlet_box(int d);
  static FrequencyWindow annulus_sector(double r_min, double r_max, const DirectionPatch& patch);

  void validate() const;
  bool contains(const Vec& xi) const;
  /// Axis-aligned bounding box of the closure.
  void bounding_box(Vec& lo, Vec& hi) const;
  double min_norm() const;  ///< inf |xi| over the closure
  double max_norm() const;  ///< sup |xi| over the closure
  /// A point of V (used as "center" by searches).
  Vec interior_point() const;
  /// Radius of a ball around interior_point() that contains V.
  double enclosing_radius() const;
  /// Extremal points of the closure: corners + face centers (box),
  /// center + axis-extremal points (ball), radial/angular extremes (sector).
  std::vector<Vec> certificate_points() const;
  /// Uniform sample from V (rejection from the bounding box).
  Vec sample(Rng& rng) const;
  /// Lebesgue measure (exact for ball/box/shearlet box; quadrature for sectors).
  double volume() const;
};

enum class Certainty { True, False, Approximate };

struct Verdict {
  Certainty certainty = Certainty::False;
  /// For Approximate: fraction of tested points that satisfied the predicate.
  double confidence = 0.0;

  static Verdict yes() { return {Certainty::True, 1.0}; }
  static Verdict no() { return {Certainty::False, 0.0}; }
  static Verdict approx(double c) { return {Certainty::Approximate, c}; }

  bool certain() const { return certainty != Certainty::Approximate; }
  bool is_true() const { return certainty == Certainty::True; }
  bool is_false() const { return certainty == Certainty::False; }
  /// True, or Approximate with every tested point passing.
  bool passes() const {
    return certainty == Certainty::True || (certainty == Certainty::Approximate && confidence >= 1.0);
  }
};

std::string to_string(const Verdict& v);

/// h^{-T} V subset of C(W,R).
Verdict k_i_contains(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v, double R);
/// h^{-T} V meets C(W,R).
Verdict k_o_contains(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v, double R);

/// A point xi' of V (or of its closure, approached from inside) whose
/// image under h^{-T} is not in C(W,R), if one is found.
std::optional<Vec> find_violating_point(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v,
                                        double R);
/// A point of V whose image lies in C(W,R), if one is found.
std::optional<Vec> find_hitting_point(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v,
                                      double R);

/// Checks that the closure of V lies in the group's open orbit. Throws
/// DomainError otherwise.
void check_window_in_orbit(const DilationGroup& group, const FrequencyWindow& v);

}  // namespace wf
