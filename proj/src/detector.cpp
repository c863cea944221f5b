#include "wavefront/detector.hpp"

#include <cfloat>
#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>

#include "wavefront/parallel.hpp"

namespace wf {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Regular: return "Regular";
    case Classification::Singular: return "Singular";
    case Classification::Inconclusive: return "Inconclusive";
    case Classification::Unresolvable: return "Unresolvable";
  }
  return "?";
}

int verdict_code(Classification c) {
  switch (c) {
    case Classification::Regular: return 1;
    case Classification::Singular: return -1;
    case Classification::Inconclusive: return 0;
    case Classification::Unresolvable: return 2;
  }
  return 0;
}

std::vector<Vec> neighborhood_offsets(int d, double spacing, int per_axis) {
  if (per_axis < 1) throw InvalidArgument("neighbourhood needs at least one offset per axis");
  std::vector<Vec> out;
  std::vector<int> idx(d, 0);
  const double mid = 0.5 * (per_axis - 1);
  for (;;) {
    Vec o(d);
    for (int j = 0; j < d; ++j) o[j] = (idx[j] - mid) * spacing;
    out.push_back(o);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

// ---------------------------------------------------------------- ladder

namespace {

// Scale s with ||canonical_element(xi, s)|| = target (bisection in log s).
GroupElement element_with_norm(const DilationGroup& g, const Vec& xi, double target) {
  auto norm_at = [&](double s) { return g.canonical_element(xi, s).op_norm; };
  double lo = 1.0, hi = 1.0;
  for (int k = 0; k < 2000 && norm_at(lo) > target; ++k) lo *= 0.5;
  for (int k = 0; k < 2000 && norm_at(hi) < target; ++k) hi *= 2.0;
  if (!(norm_at(lo) <= target && norm_at(hi) >= target)) throw NumericalError("ladder: could not bracket the scale");
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-14; ++it) {
    const double mid = std::sqrt(lo * hi);
    (norm_at(mid) < target ? lo : hi) = mid;
  }
  return g.canonical_element(xi, std::sqrt(lo * hi));
}

}  // namespace

ProbeLadder build_probe_ladder(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v,
                               const DirectionPatch& w, double R, double rho, int depth, std::vector<Vec> y_offsets) {
  if (depth < 4) throw InvalidArgument("ladder depth must be at least 4");
  if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("ladder ratio must lie in (0,1)");
  if (!group.in_open_orbit(xi)) throw DomainError("ladder direction lies outside the open orbit");
  check_window_in_orbit(group, v);
  ProbeLadder lad;
  lad.direction = xi / xi.norm();
  lad.window = v;
  lad.patch = w;
  lad.R = R;
  lad.rho = rho;
  lad.y_offsets = std::move(y_offsets);
  const int max_steps = depth + 64;
  bool started = false;
  for (int k = 0; k < max_steps && static_cast<int>(lad.elements.size()) < depth; ++k) {
    GroupElement h = element_with_norm(group, lad.direction, std::pow(rho, k));
    const Verdict ko = k_o_contains(h, w, v, R);
    const bool in_ko = ko.is_true() || (ko.certainty == Certainty::Approximate && ko.confidence > 0.0);
    if (!in_ko) {
      if (started) lad.warnings.push_back(fmt::format("ladder step {} (norm {:.3g}) outside K_o; dropped", k, h.op_norm));
      continue;
    }
    started = true;
    lad.tiers.push_back(k_i_contains(h, w, v, R).passes() ? Tier::Ki : Tier::Ko);
    lad.elements.push_back(std::move(h));
  }
  if (lad.elements.empty()) throw DomainError("no ladder element passes K_o; check window, patch and R");
  return lad;
}

// ---------------------------------------------------------------- fitting

SlopeFit decay_exponent(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw InvalidArgument("decay_exponent needs at least 3 samples");
  const double n = static_cast<double>(samples.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : samples) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0)) throw InvalidArgument("decay_exponent: all abscissae coincide");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (const auto& [x, y] : samples) f.residual = std::max(f.residual, std::abs(y - f.intercept - f.slope * x));
  f.used = static_cast<int>(samples.size());
  return f;
}

void classify_samples(DecayReport& r, const DetectorConfig& cfg) {
  const auto& s = r.samples;
  const std::size_t n = s.size();
  r.fitted = false;
  r.floor_hit = false;
  for (const auto& d : s) r.floor_hit = r.floor_hit || d.below_floor;
  // Finest quarter entirely below the numerical floor: rapid decay.
  const std::size_t quarter = std::max<std::size_t>(2, n / 4);
  if (n >= quarter) {
    bool all_below = true;
    for (std::size_t k = n - quarter; k < n; ++k) all_below = all_below && s[k].below_floor;
    if (all_below) {
      r.verdict = Classification::Regular;
      r.note = "finest samples below numerical floor";
      return;
    }
  }
  std::vector<std::pair<double, double>> usable;
  for (const auto& d : s)
    if (!d.below_floor) usable.emplace_back(std::log(d.norm), std::log(d.coeff));
  if (usable.size() < 3) {
    r.verdict = Classification::Inconclusive;
    r.note = "fewer than 3 samples above the floor";
    return;
  }
  const std::size_t take = std::max<std::size_t>(3, usable.size() / 2);
  std::vector<std::pair<double, double>> fine(usable.end() - take, usable.end());
  const SlopeFit f = decay_exponent(fine);
  r.slope = f.slope;
  r.residual = f.residual;
  r.fitted = true;
  // Super-polynomial decay bends the log-log curve downwards, which the
  // residual gate would otherwise read as a poor fit.
  const SlopeFit tail = decay_exponent({fine.end() - 3, fine.end()});
  const bool steepening = tail.slope >= f.slope;
  if (f.slope >= cfg.n_regular && (f.residual <= cfg.res_max || steepening)) {
    r.verdict = Classification::Regular;
    if (f.residual > cfg.res_max) r.note = "decay steepens at fine scales";
  } else if (f.slope <= cfg.n_singular) {
    r.verdict = Classification::Singular;
  } else {
    r.verdict = Classification::Inconclusive;
  }
}

// ---------------------------------------------------------------- evaluation

LadderEvaluator::LadderEvaluator(const AnalysedObject& u, const BandlimitedWavelet& psi, ProbeLadder ladder,
                                 double y_radius)
    : ladder_(std::move(ladder)) {
  if (u.kind == ObjectKind::Grid) {
    GridTransformer t(u.grid);
    for (std::size_t k = 0; k < ladder_.elements.size(); ++k) {
      try {
        fields_.push_back(t.field(psi, ladder_.elements[k]));
      } catch (const DomainError&) {
        ladder_.warnings.push_back(fmt::format("{} finer ladder elements alias on the grid; dropped",
                                               ladder_.elements.size() - k));
        ladder_.elements.resize(k);
        ladder_.tiers.resize(k);
        break;
      }
      double peak = 0.0;
      for (const cplx& v : fields_.back().values) peak = std::max(peak, std::abs(v));
      // FFT round-off relative to the field's peak.
      field_error_.push_back(1e-13 * peak);
    }
    return;
  }
  plans_.reserve(ladder_.elements.size());
  for (const auto& h : ladder_.elements) plans_.emplace_back(u, psi, h, y_radius);
}

Valued LadderEvaluator::field_at(std::size_t k, const Vec& y) const {
  const CoefficientField& f = fields_[k];
  std::size_t flat = 0;
  for (std::size_t j = 0; j < f.dims.size(); ++j) {
    const int n = f.dims[j];
    long i = std::lround((y[j] - f.origin[j]) / f.spacing) % n;
    if (i < 0) i += n;
    flat = flat * n + static_cast<std::size_t>(i);
  }
  return {f.values[flat], field_error_[k]};
}

std::vector<DecaySample> LadderEvaluator::samples_at(const Vec& x, const DetectorConfig& cfg) {
  std::vector<DecaySample> out;
  out.reserve(ladder_.elements.size());
  for (std::size_t k = 0; k < ladder_.elements.size(); ++k) {
    DecaySample s;
    s.norm = ladder_.elements[k].op_norm;
    s.tier = ladder_.tiers[k];
    for (const Vec& o : ladder_.y_offsets) {
      const Valued w = fields_.empty() ? plans_[k](x + o) : field_at(k, x + o);
      const double m = std::abs(w.value);
      if (m > s.coeff) s.coeff = m;
      if (w.error > s.error) s.error = w.error;
    }
    s.floor = cfg.floor_multiplier * (s.error + DBL_MIN);
    s.below_floor = s.coeff <= s.floor;
    out.push_back(s);
  }
  return out;
}

namespace {

// Cyclic shift P with (P^T v)_i = v_{(i + k) mod d}.
Mat cyclic_permutation(int d, int k) {
  Mat pt = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) pt(i, (i + k) % d) = 1.0;
  return pt.transpose();
}

std::optional<Mat> orbit_permutation(const DilationGroup& g, const Vec& xi) {
  const int d = static_cast<int>(xi.size());
  for (int k = 1; k < d; ++k) {
    Mat p = cyclic_permutation(d, k);
    if (g.in_open_orbit(p.transpose() * xi)) return p;
  }
  return std::nullopt;
}

double object_radius(const AnalysedObject& u, const std::vector<Vec>& points, const std::vector<Vec>& offsets) {
  const Vec c = u.kind == ObjectKind::Gaussian ? u.center : Vec::Zero(u.dimension());
  double r = 0.0, o = 0.0;
  for (const Vec& p : points) r = std::max(r, (p - c).norm());
  for (const Vec& q : offsets) o = std::max(o, q.norm());
  return r + o + 1e-9;
}

}  // namespace

DecayReport classify_point(const AnalysedObject& u, const BandlimitedWavelet& psi, const DilationGroup& group,
                           const Vec& x, const Vec& xi, const DetectorConfig& cfg) {
  DecayReport r;
  r.x = x;
  r.xi = xi / xi.norm();
  const AnalysedObject* obj = &u;
  AnalysedObject moved;
  Vec xx = x, dir = r.xi;
  if (!group.in_open_orbit(dir)) {
    std::optional<Mat> p = cfg.permuted_pass ? orbit_permutation(group, dir) : std::nullopt;
    if (!p) {
      r.verdict = Classification::Unresolvable;
      r.note = "direction outside the open orbit";
      return r;
    }
    moved = u.transformed(*p);
    obj = &moved;
    xx = p->transpose() * x;
    dir = p->transpose() * dir;
    r.permuted = true;
  }
  const int d = group.dimension();
  auto offsets = neighborhood_offsets(d, cfg.offset_spacing, cfg.offsets_per_axis);
  ProbeLadder lad = build_probe_ladder(group, dir, psi.support(), DirectionPatch::cap(dir, cfg.aperture), cfg.R,
                                       cfg.rho, cfg.depth, offsets);
  const double radius = object_radius(*obj, {xx}, offsets);
  LadderEvaluator ev(*obj, psi, std::move(lad), radius);
  r.samples = ev.samples_at(xx, cfg);
  classify_samples(r, cfg);
  for (const auto& w : ev.ladder().warnings) r.note += (r.note.empty() ? "" : "; ") + w;
  return r;
}

std::vector<Vec> planar_directions(int n) {
  if (n < 1) throw InvalidArgument("need at least one direction");
  std::vector<Vec> out;
  for (int j = 0; j < n; ++j) {
    const double t = kTwoPi * j / n;
    Vec v(2);
    v << std::cos(t), std::sin(t);
    for (int i = 0; i < 2; ++i)
      if (std::abs(v[i]) < 1e-12) v[i] = 0.0;
    out.push_back(v / v.norm());
  }
  return out;
}

ScanResult wavefront_scan(const AnalysedObject& u, const BandlimitedWavelet& psi, const DilationGroup& group,
                          const std::vector<Vec>& points, const std::vector<Vec>& directions,
                          const DetectorConfig& cfg, unsigned workers) {
  if (points.empty() || directions.empty()) throw InvalidArgument("wavefront_scan: empty grid");
  ScanResult s;
  s.points = points;
  s.directions = directions;
  const std::size_t np = points.size(), nd = directions.size();
  s.verdicts.assign(np * nd, Classification::Unresolvable);
  s.slopes.assign(np * nd, 0.0);
  s.permuted.assign(np * nd, false);
  std::vector<std::vector<std::string>> warn(nd);
  const int d = group.dimension();
  const auto offsets = neighborhood_offsets(d, cfg.offset_spacing, cfg.offsets_per_axis);
  parallel_for(nd, workers, [&](std::size_t q) {
    Vec dir = directions[q] / directions[q].norm();
    const AnalysedObject* obj = &u;
    AnalysedObject moved;
    std::optional<Mat> perm;
    if (!group.in_open_orbit(dir)) {
      if (cfg.permuted_pass) perm = orbit_permutation(group, dir);
      if (!perm) {
        warn[q].push_back(fmt::format("direction {} outside the open orbit: Unresolvable", q));
        return;
      }
      moved = u.transformed(*perm);
      obj = &moved;
      dir = perm->transpose() * dir;
    }
    std::vector<Vec> pts = points;
    if (perm)
      for (Vec& p : pts) p = perm->transpose() * p;
    ProbeLadder lad = build_probe_ladder(group, dir, psi.support(), DirectionPatch::cap(dir, cfg.aperture), cfg.R,
                                         cfg.rho, cfg.depth, offsets);
    for (const auto& w : lad.warnings) warn[q].push_back(fmt::format("direction {}: {}", q, w));
    LadderEvaluator ev(*obj, psi, std::move(lad), object_radius(*obj, pts, offsets));
    for (std::size_t p = 0; p < np; ++p) {
      DecayReport r;
      r.samples = ev.samples_at(pts[p], cfg);
      classify_samples(r, cfg);
      s.verdicts[p * nd + q] = r.verdict;
      s.slopes[p * nd + q] = r.slope;
      s.permuted[p * nd + q] = perm.has_value();
    }
  });
  for (auto& w : warn) s.warnings.insert(s.warnings.end(), w.begin(), w.end());
  return s;
}

// ---------------------------------------------------------------- output

void write_report_csv(const std::string& path, const DecayReport& r, const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "k,norm,log_norm,coeff,log_coeff,error,floor,below_floor,tier\n";
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.6g},{:.6g},{},{}\n", k, s.norm, std::log(s.norm), s.coeff,
                      s.coeff > 0 ? std::log(s.coeff) : -INFINITY, s.error, s.floor, s.below_floor ? 1 : 0,
                      s.tier == Tier::Ki ? "Ki" : "Ko");
  }
}

void write_scan_csv(const std::string& path, const ScanResult& s, const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  const int d = s.points.empty() ? 0 : static_cast<int>(s.points[0].size());
  os << "point";
  for (int j = 0; j < d; ++j) os << ",x" << j + 1;
  os << ",direction";
  for (int j = 0; j < d; ++j) os << ",xi" << j + 1;
  os << ",verdict,slope,permuted\n";
  for (std::size_t p = 0; p < s.points.size(); ++p) {
    for (std::size_t q = 0; q < s.directions.size(); ++q) {
      os << p;
      for (int j = 0; j < d; ++j) os << fmt::format(",{:.10g}", s.points[p][j]);
      os << ',' << q;
      for (int j = 0; j < d; ++j) os << fmt::format(",{:.10g}", s.directions[q][j]);
      const std::size_t i = p * s.directions.size() + q;
      os << ',' << to_string(s.verdicts[i]) << fmt::format(",{:.6g},", s.slopes[i]) << (s.permuted[i] ? 1 : 0)
         << '\n';
    }
  }
}

void write_scan_matrix(const std::string& path, const ScanResult& s, const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "# rows: points, columns: directions; 1 regular, -1 singular, 0 inconclusive, 2 unresolvable\n";
  for (std::size_t p = 0; p < s.points.size(); ++p) {
    for (std::size_t q = 0; q < s.directions.size(); ++q) os << (q ? " " : "") << verdict_code(s.at(p, q));
    os << '\n';
  }
}

}  // namespace wf
