#include "wavefront/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

#include "planar.hpp"

namespace wf {

std::string to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::SphericalCap: return "cap";
    case PatchKind::ShearletAxisBand: return "axis_band";
    case PatchKind::DiagonalBand: return "diagonal_band";
  }
  return "unknown";
}

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::Ball: return "ball";
    case WindowKind::Box: return "box";
    case WindowKind::ShearletBox: return "shearlet_box";
    case WindowKind::AnnulusSector: return "annulus_sector";
  }
  return "unknown";
}

std::string to_string(const Verdict& v) {
  switch (v.certainty) {
    case Certainty::True: return "True";
    case Certainty::False: return "False";
    case Certainty::Approximate: return fmt::format("Approximate({:.4f})", v.confidence);
  }
  return "?";
}

// ---------------------------------------------------------------- patches

DirectionPatch DirectionPatch::cap(const Vec& center, double radius) {
  DirectionPatch p;
  p.kind = PatchKind::SphericalCap;
  p.dimension = static_cast<int>(center.size());
  const double n = center.norm();
  if (n == 0.0) throw InvalidArgument("cap center must be nonzero");
  p.center = center / n;
  p.radius = radius;
  p.validate();
  return p;
}

DirectionPatch DirectionPatch::axis_band(int d, double eps) {
  DirectionPatch p;
  p.kind = PatchKind::ShearletAxisBand;
  p.dimension = d;
  p.eps = eps;
  p.validate();
  return p;
}

DirectionPatch DirectionPatch::diagonal_band(int d, double eps) {
  DirectionPatch p;
  p.kind = PatchKind::DiagonalBand;
  p.dimension = d;
  p.eps = eps;
  p.validate();
  return p;
}

void DirectionPatch::validate() const {
  if (dimension < 2) throw InvalidArgument("patch dimension must be >= 2");
  switch (kind) {
    case PatchKind::SphericalCap:
      if (center.size() != dimension || std::abs(center.norm() - 1.0) > 1e-12)
        throw InvalidArgument("cap center must be a unit vector");
      if (!(radius > 0.0)) throw InvalidArgument("cap radius must be positive");
      break;
    case PatchKind::ShearletAxisBand:
      if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument(fmt::format("axis band eps must lie in (0,1), got {}", eps));
      break;
    case PatchKind::DiagonalBand:
      if (!(eps > 0.0)) throw InvalidArgument("diagonal band eps must be positive");
      break;
  }
}

bool DirectionPatch::contains_direction(const Vec& u) const {
  switch (kind) {
    case PatchKind::SphericalCap: return (u - center).norm() < radius;
    case PatchKind::ShearletAxisBand: return std::abs(u[0] - 1.0) < eps;
    case PatchKind::DiagonalBand: {
      const double sd = std::sqrt(static_cast<double>(dimension));
      const double l = 1.0 / (1.0 + eps), h = 1.0 + eps;
      for (int i = 0; i < dimension; ++i) {
        double s = sd * u[i];
        if (!(s > l && s < h)) return false;
      }
      return true;
    }
  }
  return false;
}

DirectionPatch DirectionPatch::resized(double size) const {
  DirectionPatch p = *this;
  if (kind == PatchKind::SphericalCap) p.radius = size;
  else p.eps = size;
  p.validate();
  return p;
}

Vec DirectionPatch::axis() const {
  switch (kind) {
    case PatchKind::SphericalCap: return center;
    case PatchKind::ShearletAxisBand: return Vec::Unit(dimension, 0);
    case PatchKind::DiagonalBand: return Vec::Constant(dimension, 1.0 / std::sqrt(static_cast<double>(dimension)));
  }
  return Vec();
}

double DirectionPatch::enclosing_half_angle() const {
  switch (kind) {
    case PatchKind::SphericalCap: return radius >= 2.0 ? kPi : 2.0 * std::asin(radius / 2.0);
    case PatchKind::ShearletAxisBand: return std::acos(1.0 - eps);
    case PatchKind::DiagonalBand: return std::acos(1.0 / (1.0 + eps));
  }
  return kPi;
}

bool DirectionPatch::convex_cone() const {
  switch (kind) {
    case PatchKind::SphericalCap: return radius <= std::sqrt(2.0);
    case PatchKind::ShearletAxisBand: return true;
    case PatchKind::DiagonalBand: return dimension == 2;
  }
  return false;
}

void DirectionPatch::coordinate_bounds(Vec& lo, Vec& hi) const {
  lo.resize(dimension);
  hi.resize(dimension);
  switch (kind) {
    case PatchKind::SphericalCap:
      for (int i = 0; i < dimension; ++i) {
        lo[i] = std::max(-1.0, center[i] - radius);
        hi[i] = std::min(1.0, center[i] + radius);
      }
      break;
    case PatchKind::ShearletAxisBand: {
      const double t = std::sqrt(1.0 - (1.0 - eps) * (1.0 - eps));
      lo.setConstant(-t);
      hi.setConstant(t);
      lo[0] = 1.0 - eps;
      hi[0] = 1.0;
      break;
    }
    case PatchKind::DiagonalBand: {
      const double sd = std::sqrt(static_cast<double>(dimension));
      lo.setConstant(1.0 / (1.0 + eps) / sd);
      hi.setConstant(std::min(1.0, (1.0 + eps) / sd));
      break;
    }
  }
}

bool cone_contains(const DirectionPatch& w, double R, const Vec& v) {
  const double n = v.norm();
  if (n == 0.0 || !(n > R)) return false;
  if (w.kind == PatchKind::ShearletAxisBand) {
    if (!(v[0] > 0.0)) return false;
    const double thr = std::sqrt(2.0 * w.eps - w.eps * w.eps) / (1.0 - w.eps);
    return v.tail(v.size() - 1).norm() / v[0] < thr;
  }
  return w.contains_direction(v / n);
}

bool cone_contains(const ConeSpec& cone, const Vec& v) { return cone_contains(cone.patch, cone.R, v); }

// ---------------------------------------------------------------- windows

FrequencyWindow FrequencyWindow::ball(const Vec& center, double radius) {
  FrequencyWindow v;
  v.kind = WindowKind::Ball;
  v.dimension = static_cast<int>(center.size());
  v.center = center;
  v.radius = radius;
  v.validate();
  return v;
}

FrequencyWindow FrequencyWindow::box(const Vec& lo, const Vec& hi) {
  FrequencyWindow v;
  v.kind = WindowKind::Box;
  v.dimension = static_cast<int>(lo.size());
  v.lo = lo;
  v.hi = hi;
  v.validate();
  return v;
}

FrequencyWindow FrequencyWindow::shearlet_box(int d) {
  FrequencyWindow v;
  v.kind = WindowKind::ShearletBox;
  v.dimension = d;
  v.lo = Vec::Constant(d, -1.0);
  v.hi = Vec::Constant(d, 1.0);
  v.lo[0] = 1.0;
  v.hi[0] = 2.0;
  v.validate();
  return v;
}

FrequencyWindow FrequencyWindow::annulus_sector(double r_min, double r_max, const DirectionPatch& patch) {
  FrequencyWindow v;
  v.kind = WindowKind::AnnulusSector;
  v.dimension = patch.dimension;
  v.r_min = r_min;
  v.r_max = r_max;
  v.sector = patch;
  v.validate();
  return v;
}

void FrequencyWindow::validate() const {
  if (dimension < 2) throw InvalidArgument("window dimension must be >= 2");
  if (sample_budget < 1) throw InvalidArgument("window sample budget must be positive");
  switch (kind) {
    case WindowKind::Ball:
      if (center.size() != dimension) throw InvalidArgument("ball center has wrong dimension");
      if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
      break;
    case WindowKind::Box:
    case WindowKind::ShearletBox:
      if (lo.size() != dimension || hi.size() != dimension) throw InvalidArgument("box bounds have wrong dimension");
      for (int i = 0; i < dimension; ++i)
        if (!(lo[i] < hi[i])) throw InvalidArgument("box must have lo < hi in every coordinate");
      break;
    case WindowKind::AnnulusSector:
      if (!sector) throw InvalidArgument("annulus sector needs a direction patch");
      sector->validate();
      if (!(r_min > 0.0 && r_max > r_min)) throw InvalidArgument("annulus sector needs 0 < r_min < r_max");
      break;
  }
}

bool FrequencyWindow::contains(const Vec& xi) const {
  switch (kind) {
    case WindowKind::Ball: return (xi - center).norm() < radius;
    case WindowKind::Box:
      for (int i = 0; i < dimension; ++i)
        if (!(xi[i] > lo[i] && xi[i] < hi[i])) return false;
      return true;
    case WindowKind::ShearletBox:
      return xi[0] > 1.0 && xi[0] < 2.0 && xi.tail(dimension - 1).norm() < 1.0;
    case WindowKind::AnnulusSector: {
      const double r = xi.norm();
      return r > r_min && r < r_max && sector->contains_direction(xi / r);
    }
  }
  return false;
}

void FrequencyWindow::bounding_box(Vec& blo, Vec& bhi) const {
  switch (kind) {
    case WindowKind::Ball:
      blo = center.array() - radius;
      bhi = center.array() + radius;
      return;
    case WindowKind::Box:
    case WindowKind::ShearletBox:
      blo = lo;
      bhi = hi;
      return;
    case WindowKind::AnnulusSector: {
      Vec ulo, uhi;
      sector->coordinate_bounds(ulo, uhi);
      blo.resize(dimension);
      bhi.resize(dimension);
      for (int i = 0; i < dimension; ++i) {
        double c[4] = {r_min * ulo[i], r_max * ulo[i], r_min * uhi[i], r_max * uhi[i]};
        blo[i] = *std::min_element(c, c + 4);
        bhi[i] = *std::max_element(c, c + 4);
      }
      return;
    }
  }
}

double FrequencyWindow::min_norm() const {
  switch (kind) {
    case WindowKind::Ball: return std::max(0.0, center.norm() - radius);
    case WindowKind::Box: {
      Vec z = Vec::Zero(dimension);
      return (z.cwiseMax(lo).cwiseMin(hi)).norm();
    }
    case WindowKind::ShearletBox: return 1.0;
    case WindowKind::AnnulusSector: return r_min;
  }
  return 0.0;
}

double FrequencyWindow::max_norm() const {
  switch (kind) {
    case WindowKind::Ball: return center.norm() + radius;
    case WindowKind::Box: return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
    case WindowKind::ShearletBox: return std::sqrt(5.0);
    case WindowKind::AnnulusSector: return r_max;
  }
  return 0.0;
}

Vec FrequencyWindow::interior_point() const {
  switch (kind) {
    case WindowKind::Ball: return center;
    case WindowKind::Box: return 0.5 * (lo + hi);
    case WindowKind::ShearletBox: {
      Vec p = Vec::Zero(dimension);
      p[0] = 1.5;
      return p;
    }
    case WindowKind::AnnulusSector: return 0.5 * (r_min + r_max) * sector->axis();
  }
  return Vec();
}

double FrequencyWindow::enclosing_radius() const {
  if (kind == WindowKind::Ball) return radius;
  Vec blo, bhi;
  bounding_box(blo, bhi);
  Vec ip = interior_point();
  Vec far = (ip - blo).cwiseAbs().cwiseMax((bhi - ip).cwiseAbs());
  return far.norm();
}

std::vector<Vec> FrequencyWindow::certificate_points() const {
  std::vector<Vec> pts;
  const int d = dimension;
  switch (kind) {
    case WindowKind::Box:
    case WindowKind::ShearletBox: {
      if (kind == WindowKind::Box || d == 2) {
        for (int mask = 0; mask < (1 << d); ++mask) {
          Vec p(d);
          for (int i = 0; i < d; ++i) p[i] = (mask >> i) & 1 ? hi[i] : lo[i];
          pts.push_back(p);
        }
        Vec mid = 0.5 * (lo + hi);
        for (int i = 0; i < d; ++i) {
          Vec a = mid, b = mid;
          a[i] = lo[i];
          b[i] = hi[i];
          pts.push_back(a);
          pts.push_back(b);
        }
      } else {
        for (double x1 : {1.0, 1.5, 2.0}) {
          Vec p = Vec::Zero(d);
          p[0] = x1;
          pts.push_back(p);
          for (int i = 1; i < d; ++i) {
            for (double s : {-1.0, 1.0}) {
              Vec q = p;
              q[i] = s;
              pts.push_back(q);
            }
          }
        }
      }
      break;
    }
    case WindowKind::Ball:
      pts.push_back(center);
      for (int i = 0; i < d; ++i) {
        for (double s : {-1.0, 1.0}) {
          Vec p = center;
          p[i] += s * radius;
          pts.push_back(p);
        }
      }
      break;
    case WindowKind::AnnulusSector: {
      Vec ax = sector->axis();
      for (double r : {r_min, r_max}) pts.push_back(r * ax);
      if (d == 2) {
        planar::Arc a = planar::patch_arc(*sector);
        for (double r : {r_min, r_max}) {
          pts.push_back(r * planar::unit(a.lo));
          pts.push_back(r * planar::unit(a.hi()));
        }
      }
      break;
    }
  }
  return pts;
}

Vec FrequencyWindow::sample(Rng& rng) const {
  Vec blo, bhi;
  bounding_box(blo, bhi);
  Vec p(dimension);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    for (int i = 0; i < dimension; ++i) p[i] = uniform(rng, blo[i], bhi[i]);
    if (contains(p)) return p;
  }
  throw NumericalError("window sampling failed; window is (numerically) empty");
}

static double unit_ball_volume(int d) {
  return std::pow(kPi, 0.5 * d) / boost::math::tgamma(0.5 * d + 1.0);
}

double FrequencyWindow::volume() const {
  switch (kind) {
    case WindowKind::Ball: return unit_ball_volume(dimension) * std::pow(radius, dimension);
    case WindowKind::Box: return (hi - lo).prod();
    case WindowKind::ShearletBox: return unit_ball_volume(dimension - 1);
    case WindowKind::AnnulusSector: {
      if (dimension == 2) {
        return 0.5 * (r_max * r_max - r_min * r_min) * planar::patch_arc(*sector).span;
      }
      Vec blo, bhi;
      bounding_box(blo, bhi);
      Rng rng = make_rng(0xA11, 7);
      const int n = 200000;
      int hits = 0;
      for (int k = 0; k < n; ++k) {
        Vec p(dimension);
        for (int i = 0; i < dimension; ++i) p[i] = uniform(rng, blo[i], bhi[i]);
        hits += contains(p);
      }
      return (bhi - blo).prod() * hits / n;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- predicates

namespace {

constexpr std::uint64_t kPredicateSeed = 0x6b5f1e2d3c4a5968ULL;

std::vector<Vec> interior_samples(const FrequencyWindow& v) {
  // Deterministic: the same window always yields the same test points.
  Rng rng = make_rng(kPredicateSeed, static_cast<std::uint64_t>(v.sample_budget));
  std::vector<Vec> pts;
  pts.reserve(v.sample_budget + 1);
  pts.push_back(v.interior_point());
  for (int k = 0; k < v.sample_budget; ++k) pts.push_back(v.sample(rng));
  return pts;
}

double min_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[m.rows() - 1];
}

Verdict k_i_planar(const Mat& m, const DirectionPatch& w, const FrequencyWindow& v, double R) {
  planar::Arc img = planar::map_arc(m, planar::window_arc(v));
  if (!planar::arc_subset(img, planar::patch_arc(w))) return Verdict::no();
  if (R > 0 && planar::min_norm_sq(m, v) < R * R) return Verdict::no();
  return Verdict::yes();
}

Verdict k_o_planar(const Mat& m, const DirectionPatch& w, const FrequencyWindow& v, double R) {
  planar::Arc varc = planar::window_arc(v);
  planar::Arc warc = planar::patch_arc(w);
  if (warc.span <= 0) return Verdict::no();
  planar::Arc pre = planar::map_arc(m.inverse(), warc);
  for (const planar::Arc& piece : planar::arc_intersect(varc, pre)) {
    if (piece.span <= 0) continue;
    double s = planar::max_norm_sq_in(m, v, piece);
    if (s > R * R) return Verdict::yes();
  }
  return Verdict::no();
}

}  // namespace

Verdict k_i_contains(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v, double R) {
  if (h.dimension() != v.dimension || w.dimension != v.dimension) throw InvalidArgument("k_i_contains: dimension mismatch");
  const Mat& m = h.inv_transpose;
  if (v.dimension == 2) return k_i_planar(m, w, v, R);
  for (const Vec& p : interior_samples(v)) {
    if (!cone_contains(w, R, m * p)) return Verdict::no();
  }
  if (w.convex_cone()) {
    Vec blo, bhi;
    v.bounding_box(blo, bhi);
    bool all = true;
    const int d = v.dimension;
    for (int mask = 0; mask < (1 << d) && all; ++mask) {
      Vec p(d);
      for (int i = 0; i < d; ++i) p[i] = (mask >> i) & 1 ? bhi[i] : blo[i];
      all = cone_contains(w, 0.0, m * p);
    }
    if (all && min_singular_value(m) * v.min_norm() >= R) return Verdict::yes();
  }
  return Verdict::approx(1.0);
}

Verdict k_o_contains(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v, double R) {
  if (h.dimension() != v.dimension || w.dimension != v.dimension) throw InvalidArgument("k_o_contains: dimension mismatch");
  const Mat& m = h.inv_transpose;
  if (v.dimension == 2) return k_o_planar(m, w, v, R);
  if (h.op_norm > 0 && operator_norm(m) * v.max_norm() <= R) return Verdict::no();
  Vec ip = m * v.interior_point();
  const double spread = operator_norm(m) * v.enclosing_radius();
  if (spread < ip.norm()) {
    double half = std::asin(spread / ip.norm());
    double ang = std::acos(std::clamp(ip.normalized().dot(w.axis()), -1.0, 1.0));
    if (ang > half + w.enclosing_half_angle()) return Verdict::no();
  }
  for (const Vec& p : interior_samples(v)) {
    if (cone_contains(w, R, m * p)) return Verdict::yes();
  }
  return Verdict::approx(0.0);
}

namespace {

std::vector<Vec> search_candidates(const Mat& m, const FrequencyWindow& v) {
  std::vector<Vec> c;
  if (v.dimension == 2) {
    for (const Vec& p : planar::arc_endpoint_points(v)) c.push_back(p);
    Vec amin;
    planar::min_norm_sq(m, v, &amin);
    c.push_back(amin);
    planar::Arc full{0.0, kTwoPi};
    Vec amax;
    if (v.kind != WindowKind::AnnulusSector && planar::max_norm_sq_in(m, v, full, &amax) >= 0) c.push_back(amax);
  }
  for (const Vec& p : v.certificate_points()) c.push_back(p);
  // Closure points are pulled slightly inside so the witness lies in V itself.
  const Vec ip = v.interior_point();
  std::vector<Vec> out;
  for (const Vec& p : c) {
    for (double t : {1e-9, 1e-6, 1e-3}) {
      Vec q = p + t * (ip - p);
      if (v.contains(q)) {
        out.push_back(q);
        break;
      }
    }
  }
  for (const Vec& p : interior_samples(v)) out.push_back(p);
  return out;
}

}  // namespace

std::optional<Vec> find_violating_point(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v,
                                        double R) {
  const Mat& m = h.inv_transpose;
  for (const Vec& q : search_candidates(m, v)) {
    if (!cone_contains(w, R, m * q)) return q;
  }
  return std::nullopt;
}

std::optional<Vec> find_hitting_point(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v,
                                      double R) {
  const Mat& m = h.inv_transpose;
  if (v.dimension == 2) {
    // Inside the overlap sector the maximizer of |M xi| is the best candidate.
    planar::Arc pre = planar::map_arc(m.inverse(), planar::patch_arc(w));
    for (const planar::Arc& piece : planar::arc_intersect(planar::window_arc(v), pre)) {
      Vec amax;
      if (piece.span <= 0 || planar::max_norm_sq_in(m, v, piece, &amax) < 0) continue;
      Vec mid = planar::unit(piece.lo + 0.5 * piece.span);
      for (double t : {1e-9, 1e-7, 1e-5, 1e-3}) {
        Vec target = v.interior_point();
        // Move towards the sector's bisector so the point stays inside both sets.
        Vec q = amax + t * (target.norm() * mid - amax);
        if (v.contains(q) && cone_contains(w, R, m * q)) return q;
      }
    }
  }
  for (const Vec& q : search_candidates(m, v)) {
    if (cone_contains(w, R, m * q)) return q;
  }
  return std::nullopt;
}

void check_window_in_orbit(const DilationGroup& group, const FrequencyWindow& v) {
  v.validate();
  if (v.dimension != group.dimension()) throw DomainError("window dimension differs from group dimension");
  Vec blo, bhi;
  v.bounding_box(blo, bhi);
  switch (group.kind()) {
    case GroupKind::Similitude:
      if (!(v.min_norm() > 0.0)) throw DomainError("window closure contains the origin");
      return;
    case GroupKind::Shearlet:
      if (!(blo[0] > 0.0 || bhi[0] < 0.0)) throw DomainError("window closure meets the hyperplane xi_1 = 0");
      return;
    case GroupKind::Diagonal:
      for (int i = 0; i < v.dimension; ++i)
        if (!(blo[i] > 0.0 || bhi[i] < 0.0))
          throw DomainError(fmt::format("window closure meets the hyperplane xi_{} = 0", i + 1));
      return;
    case GroupKind::Custom:
      for (const Vec& p : v.certificate_points())
        if (!group.in_open_orbit(p)) throw DomainError("window certificate point outside the custom orbit");
      return;
  }
}

}  // namespace wf
