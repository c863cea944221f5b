#include "planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace wf::planar {

double wrap(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double angle_of(const Vec& v) { return std::atan2(v[1], v[0]); }

Vec unit(double angle) {
  Vec u(2);
  u << std::cos(angle), std::sin(angle);
  return u;
}

bool arc_contains(const Arc& a, double angle, double tol) {
  if (a.full()) return true;
  double off = wrap(angle - a.lo);
  if (off <= a.span + tol) return true;
  return off >= kTwoPi - tol;
}

bool arc_subset(const Arc& a, const Arc& b, double tol) {
  if (b.full()) return true;
  if (a.full()) return false;
  double off = wrap(a.lo - b.lo);
  if (off > kTwoPi - tol) off -= kTwoPi;
  return off >= -tol && off + a.span <= b.span + tol;
}

std::vector<Arc> arc_intersect(const Arc& a, const Arc& b) {
  if (a.full()) return {b};
  if (b.full()) return {a};
  std::vector<Arc> out;
  // Piece starting inside a at b.lo, and piece starting inside b at a.lo.
  double off_b = wrap(b.lo - a.lo);
  if (off_b < a.span) {
    double len = std::min(a.span - off_b, b.span);
    if (len > 0) out.push_back({b.lo, len});
  }
  double off_a = wrap(a.lo - b.lo);
  if (off_a < b.span && off_a > 0) {
    double len = std::min(b.span - off_a, a.span);
    if (len > 0) out.push_back({a.lo, len});
  }
  return out;
}

Arc patch_arc(const DirectionPatch& w) {
  switch (w.kind) {
    case PatchKind::SphericalCap: {
      if (w.radius >= 2.0) return {0.0, kTwoPi};
      double beta = 2.0 * std::asin(w.radius / 2.0);
      return {angle_of(w.center) - beta, 2.0 * beta};
    }
    case PatchKind::ShearletAxisBand: {
      double beta = std::acos(1.0 - w.eps);
      return {-beta, 2.0 * beta};
    }
    case PatchKind::DiagonalBand: {
      const double l = 1.0 / (1.0 + w.eps) / std::sqrt(2.0);
      const double u = std::min(1.0, (1.0 + w.eps) / std::sqrt(2.0));
      double lo = std::max(std::asin(l), std::acos(u));
      double hi = std::min(std::acos(l), std::asin(u));
      return {lo, std::max(0.0, hi - lo)};
    }
  }
  return {0.0, 0.0};
}

std::vector<Vec> box_polygon(const FrequencyWindow& v) {
  Vec lo, hi;
  v.bounding_box(lo, hi);
  std::vector<Vec> p(4, Vec(2));
  p[0] << lo[0], lo[1];
  p[1] << hi[0], lo[1];
  p[2] << hi[0], hi[1];
  p[3] << lo[0], hi[1];
  return p;
}

Arc window_arc(const FrequencyWindow& v) {
  switch (v.kind) {
    case WindowKind::Ball: {
      const double n = v.center.norm();
      if (n <= v.radius) throw DomainError("window closure contains the origin");
      const double beta = std::asin(v.radius / n);
      return {angle_of(v.center) - beta, 2.0 * beta};
    }
    case WindowKind::Box:
    case WindowKind::ShearletBox: {
      Vec lo, hi;
      v.bounding_box(lo, hi);
      if (lo[0] <= 0 && hi[0] >= 0 && lo[1] <= 0 && hi[1] >= 0)
        throw DomainError("window closure contains the origin");
      const double ref = angle_of(0.5 * (lo + hi));
      double mn = 0, mx = 0;
      for (const Vec& c : box_polygon(v)) {
        double rel = wrap(angle_of(c) - ref + kPi) - kPi;
        mn = std::min(mn, rel);
        mx = std::max(mx, rel);
      }
      return {ref + mn, mx - mn};
    }
    case WindowKind::AnnulusSector: return patch_arc(*v.sector);
  }
  return {0.0, 0.0};
}

Arc map_arc(const Mat& m, const Arc& a) {
  if (a.full()) return a;
  if (a.span > kPi) {
    Arc comp{a.hi(), kTwoPi - a.span};
    Arc img = map_arc(m, comp);
    return {img.hi(), kTwoPi - img.span};
  }
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const double a1 = angle_of(m * unit(a.lo));
  const double a2 = angle_of(m * unit(a.hi()));
  if (det > 0) return {a1, a.span == 0 ? 0.0 : wrap(a2 - a1)};
  return {a2, a.span == 0 ? 0.0 : wrap(a1 - a2)};
}

namespace {

double quad(const Mat& m, const Vec& x) { return (m * x).squaredNorm(); }

// Extremes of u^T A u over the closed arc; sign = +1 for max, -1 for min.
double form_extreme_on_arc(const Mat& m, const Arc& arc, double sign, double* arg) {
  Mat a = m.transpose() * m;
  std::vector<double> cands = {arc.lo, arc.hi()};
  Eigen::SelfAdjointEigenSolver<Mat> es(a);
  for (int k = 0; k < 2; ++k) {
    double t = angle_of(es.eigenvectors().col(k));
    for (double s : {t, t + kPi}) {
      if (arc_contains(arc, s)) cands.push_back(s);
    }
  }
  double best = sign > 0 ? -1.0 : std::numeric_limits<double>::infinity();
  for (double t : cands) {
    double f = quad(m, unit(t));
    if ((sign > 0 && f > best) || (sign < 0 && f < best)) {
      best = f;
      if (arg) *arg = t;
    }
  }
  return best;
}

Vec circle_point(const FrequencyWindow& v, double t) { return v.center + v.radius * unit(t); }

double refine_on_circle(const Mat& m, const FrequencyWindow& v, double t0, double h, double sign, double* targ) {
  auto f = [&](double t) { return -sign * quad(m, circle_point(v, t)); };
  auto r = boost::math::tools::brent_find_minima(f, t0 - h, t0 + h, 52);
  *targ = r.first;
  return -sign * r.second;
}

// Polygon clipped to the half-plane n . x >= 0 (Sutherland-Hodgman).
std::vector<Vec> clip(const std::vector<Vec>& poly, const Vec& n) {
  std::vector<Vec> out;
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % k];
    double dp = n.dot(p), dq = n.dot(q);
    if (dp >= 0) out.push_back(p);
    if ((dp >= 0) != (dq >= 0)) {
      double s = dp / (dp - dq);
      out.push_back(p + s * (q - p));
    }
  }
  return out;
}

}  // namespace

double min_norm_sq(const Mat& m, const FrequencyWindow& v, Vec* argmin) {
  switch (v.kind) {
    case WindowKind::Box:
    case WindowKind::ShearletBox: {
      auto poly = box_polygon(v);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec& p = poly[i];
        Vec e = poly[(i + 1) % poly.size()] - p;
        Vec mp = m * p, me = m * e;
        double den = me.squaredNorm();
        double s = den > 0 ? std::clamp(-mp.dot(me) / den, 0.0, 1.0) : 0.0;
        Vec x = p + s * e;
        double f = quad(m, x);
        if (f < best) {
          best = f;
          if (argmin) *argmin = x;
        }
      }
      return best;
    }
    case WindowKind::Ball: {
      const int n = 360;
      double best = std::numeric_limits<double>::infinity(), tb = 0;
      for (int k = 0; k < n; ++k) {
        double t = kTwoPi * k / n;
        double f = quad(m, circle_point(v, t));
        if (f < best) best = f, tb = t;
      }
      double t;
      double f = refine_on_circle(m, v, tb, kTwoPi / n, -1.0, &t);
      if (f < best) best = f, tb = t;
      if (argmin) *argmin = circle_point(v, tb);
      return best;
    }
    case WindowKind::AnnulusSector: {
      double t = 0;
      double f = form_extreme_on_arc(m, patch_arc(*v.sector), -1.0, &t);
      if (argmin) *argmin = v.r_min * unit(t);
      return v.r_min * v.r_min * f;
    }
  }
  return 0.0;
}

double max_norm_sq_in(const Mat& m, const FrequencyWindow& v, const Arc& arc, Vec* argmax) {
  switch (v.kind) {
    case WindowKind::Box:
    case WindowKind::ShearletBox: {
      auto poly = box_polygon(v);
      if (!arc.full()) {
        Vec ulo = unit(arc.lo), uhi = unit(arc.hi());
        Vec nlo(2), nhi(2);
        nlo << -ulo[1], ulo[0];
        nhi << uhi[1], -uhi[0];
        poly = clip(clip(poly, nlo), nhi);
      }
      if (poly.empty()) return -1.0;
      double best = -1.0;
      for (const Vec& x : poly) {
        double f = quad(m, x);
        if (f > best) {
          best = f;
          if (argmax) *argmax = x;
        }
      }
      return best;
    }
    case WindowKind::Ball: {
      const double cn = v.center.norm();
      const double r2 = v.radius * v.radius;
      double best = -1.0;
      Vec bx;
      auto consider = [&](const Vec& x) {
        double f = quad(m, x);
        if (f > best) best = f, bx = x;
      };
      if (!arc.full()) {
        for (double ang : {arc.lo, arc.hi()}) {
          Vec u = unit(ang);
          double uc = u.dot(v.center);
          double disc = uc * uc - cn * cn + r2;
          if (disc < 0) continue;
          for (double s : {uc - std::sqrt(disc), uc + std::sqrt(disc)}) {
            if (s > 0) consider(s * u);
          }
        }
      }
      const int n = 360;
      const double h = kTwoPi / n;
      double tb = 0;
      bool have_sample = false;
      double best_sample = -1.0;
      for (int k = 0; k < n; ++k) {
        double t = h * k;
        Vec x = circle_point(v, t);
        if (!arc_contains(arc, angle_of(x))) continue;
        double f = quad(m, x);
        if (f > best_sample) best_sample = f, tb = t, have_sample = true;
        consider(x);
      }
      if (have_sample) {
        Vec a = circle_point(v, tb - h), b = circle_point(v, tb + h);
        if (arc_contains(arc, angle_of(a)) && arc_contains(arc, angle_of(b))) {
          double t;
          refine_on_circle(m, v, tb, h, 1.0, &t);
          consider(circle_point(v, t));
        }
      }
      if (best >= 0 && argmax) *argmax = bx;
      return best;
    }
    case WindowKind::AnnulusSector: {
      auto pieces = arc_intersect(patch_arc(*v.sector), arc);
      double best = -1.0;
      for (const Arc& p : pieces) {
        double t = 0;
        double f = form_extreme_on_arc(m, p, 1.0, &t);
        if (f > best) {
          best = f;
          if (argmax) *argmax = v.r_max * unit(t);
        }
      }
      return best < 0 ? -1.0 : v.r_max * v.r_max * best;
    }
  }
  return -1.0;
}

std::vector<Vec> arc_endpoint_points(const FrequencyWindow& v) {
  std::vector<Vec> out;
  switch (v.kind) {
    case WindowKind::Ball: {
      const double n2 = v.center.squaredNorm();
      const double r2 = v.radius * v.radius;
      Vec perp(2);
      perp << -v.center[1], v.center[0];
      Vec base = v.center * (1.0 - r2 / n2);
      Vec off = perp * (v.radius * std::sqrt(std::max(0.0, n2 - r2)) / n2);
      out.push_back(base + off);
      out.push_back(base - off);
      break;
    }
    case WindowKind::Box:
    case WindowKind::ShearletBox: {
      Arc a = window_arc(v);
      for (const Vec& c : box_polygon(v)) {
        double t = angle_of(c);
        if (std::abs(wrap(t - a.lo + 1e-12) - 1e-12) < 1e-12 || std::abs(wrap(t - a.hi() + 1e-12) - 1e-12) < 1e-12)
          out.push_back(c);
      }
      break;
    }
    case WindowKind::AnnulusSector: {
      Arc a = patch_arc(*v.sector);
      const double r = 0.5 * (v.r_min + v.r_max);
      out.push_back(r * unit(a.lo));
      out.push_back(r * unit(a.hi()));
      break;
    }
  }
  return out;
}

}  // namespace wf::planar
