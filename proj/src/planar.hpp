#pragma once

// Exact two-dimensional geometry behind the K_i / K_o predicates. Every
// direction set is an arc of S^1; images of windows under a 2x2 linear map
// are handled through their direction arcs and the extremes of |M xi|.

#include <vector>

#include "wavefront/geometry.hpp"

namespace wf::planar {

struct Arc {
  double lo = 0.0;
  double span = 0.0;  ///< >= 2 pi means the full circle
  bool full() const { return span >= kTwoPi; }
  double hi() const { return lo + span; }
};

double wrap(double angle);  ///< into [0, 2 pi)
double angle_of(const Vec& v);
Vec unit(double angle);

bool arc_contains(const Arc& a, double angle, double tol = 0.0);
/// closure(a) inside closure(b).
bool arc_subset(const Arc& a, const Arc& b, double tol = 0.0);
/// Intersection of open arcs; at most two pieces.
std::vector<Arc> arc_intersect(const Arc& a, const Arc& b);

Arc patch_arc(const DirectionPatch& w);
/// Directions of the closure of V. Throws DomainError if 0 is in the closure.
Arc window_arc(const FrequencyWindow& v);
/// Directions of {M x : direction(x) in a}.
Arc map_arc(const Mat& m, const Arc& a);

/// min |M xi|^2 over the closure of V.
double min_norm_sq(const Mat& m, const FrequencyWindow& v, Vec* argmin = nullptr);
/// sup |M xi|^2 over the closure of V intersected with the sector over `arc`
/// (arc span < pi). Returns -1 when the intersection is empty.
double max_norm_sq_in(const Mat& m, const FrequencyWindow& v, const Arc& arc, Vec* argmax = nullptr);

/// Closure points whose directions are the endpoints of window_arc(v).
std::vector<Vec> arc_endpoint_points(const FrequencyWindow& v);

/// Polygon vertices of a box window (counter-clockwise).
std::vector<Vec> box_polygon(const FrequencyWindow& v);

}  // namespace wf::planar
