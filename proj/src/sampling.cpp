#include "wavefront/sampling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "planar.hpp"
#include "wavefront/quadrature.hpp"

namespace wf {

namespace {

struct Interval {
  double lo, hi;
  double length() const { return hi - lo; }
};

Interval quotient(Interval num, Interval den) {
  if (den.lo <= 0.0 && den.hi >= 0.0) throw InvalidArgument("chart bound derivation: denominator interval contains 0");
  double c[4] = {num.lo / den.lo, num.lo / den.hi, num.hi / den.lo, num.hi / den.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Interval abs_interval(Interval x) {
  if (x.lo >= 0) return x;
  if (x.hi <= 0) return {-x.hi, -x.lo};
  return {0.0, std::max(-x.lo, x.hi)};
}

double sign_of_interval(Interval x, const char* what) {
  if (x.lo > 0) return 1.0;
  if (x.hi < 0) return -1.0;
  throw InvalidArgument(fmt::format("{}: coordinate range straddles 0", what));
}

double log_uniform(Rng& rng, double lo, double hi) { return lo * std::exp(uniform01(rng) * std::log(hi / lo)); }

Estimate mean_estimate(double sum, double sum_sq, long n) {
  Estimate e;
  e.samples = n;
  if (n == 0) return e;
  e.value = sum / n;
  const double var = std::max(0.0, sum_sq / n - e.value * e.value);
  e.stderr_ = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  return e;
}

double angular_radius(const FrequencyWindow& v) {
  const Vec ip = v.interior_point();
  const double r = v.enclosing_radius();
  return r < ip.norm() ? std::asin(r / ip.norm()) : kPi;
}

}  // namespace

double cap_fraction(int d, double phi) {
  if (phi >= kPi) return 1.0;
  if (phi <= 0.0) return 0.0;
  // ratio of int_0^phi sin^{d-2} to int_0^pi sin^{d-2}
  const GaussRule& rule = gauss_rule(32);
  std::vector<double> x, w;
  auto integral = [&](double hi) {
    composite_rule(0.0, hi, 16, rule, x, w);
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * std::pow(std::sin(x[k]), d - 2);
    return acc;
  };
  return integral(phi) / integral(kPi);
}

Vec sample_in_cap(Rng& rng, const Vec& axis, double phi) {
  const int d = static_cast<int>(axis.size());
  const Vec n = axis / axis.norm();
  if (phi >= kPi) return random_unit_vector(rng, d);
  // polar angle with density proportional to sin^{d-2}, by rejection
  const double smax = phi >= kPi / 2 ? 1.0 : std::sin(phi);
  double t;
  for (;;) {
    t = uniform(rng, 0.0, phi);
    if (d == 2 || uniform01(rng) * std::pow(smax, d - 2) <= std::pow(std::sin(t), d - 2)) break;
  }
  Vec r;
  do {
    r = random_normal_vector(rng, d);
    r -= r.dot(n) * n;
  } while (r.norm() < 1e-12);
  r /= r.norm();
  if (d == 2 && uniform01(rng) < 0.5) r = -r;
  return std::cos(t) * n + std::sin(t) * r;
}

// ---------------------------------------------------------------- stay charts

StayChart stay_chart(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v) {
  if (!group.in_open_orbit(xi)) throw DomainError("stay_chart: xi outside the open orbit");
  check_window_in_orbit(group, v);
  const int d = group.dimension();
  Vec blo, bhi;
  v.bounding_box(blo, bhi);
  StayChart c;
  switch (group.kind()) {
    case GroupKind::Shearlet: {
      const auto& cs = group.spec().anisotropy;
      const double s1 = sign_of_interval({blo[0], bhi[0]}, "shearlet stay chart");
      const double s = s1 * (xi[0] > 0 ? 1.0 : -1.0);
      const double ax = std::abs(xi[0]);
      Interval e1 = abs_interval({blo[0], bhi[0]});
      c.lo = blo;
      c.hi = bhi;
      c.lo[0] = e1.lo / ax;
      c.hi[0] = e1.hi / ax;
      c.element = [&group, xi, s, cs, d](const Vec& t) {
        Vec p(d + 1);
        p[0] = s;
        p[1] = t[0];
        for (int i = 1; i < d; ++i) p[1 + i] = (s * t[i] - std::pow(t[0], cs[i - 1]) * xi[i]) / xi[0];
        return group.element(p);
      };
      c.dual_image = [xi, s](const Vec& t) {
        Vec eta = t;
        eta[0] = s * t[0] * xi[0];
        return eta;
      };
      c.weight = [ax, d](const Vec& t) { return std::pow(t[0], -d) * std::pow(ax, 1 - d); };
      break;
    }
    case GroupKind::Diagonal: {
      c.lo.resize(d);
      c.hi.resize(d);
      for (int i = 0; i < d; ++i) {
        const double p = blo[i] / xi[i], q = bhi[i] / xi[i];
        c.lo[i] = std::min(p, q);
        c.hi[i] = std::max(p, q);
      }
      c.element = [&group](const Vec& t) { return group.element(t); };
      c.dual_image = [xi](const Vec& t) { return Vec(t.cwiseProduct(xi)); };
      c.weight = [](const Vec& t) { return 1.0 / t.cwiseAbs().prod(); };
      break;
    }
    case GroupKind::Similitude: {
      const double n = xi.norm();
      const double amin = v.min_norm() / n, amax = v.max_norm() / n;
      if (d == 2) {
        planar::Arc arc = planar::window_arc(v);
        const double phi = planar::angle_of(xi);
        c.lo = Vec(2);
        c.hi = Vec(2);
        c.lo << amin, arc.full() ? 0.0 : phi - arc.hi();
        c.hi << amax, arc.full() ? kTwoPi : phi - arc.lo;
        c.element = [&group](const Vec& t) { return group.element(similitude_params_2d(t[0], t[1])); };
        c.dual_image = [xi](const Vec& t) {
          // a R_{-theta} xi
          const double cs = std::cos(t[1]), sn = std::sin(t[1]);
          Vec eta(2);
          eta << t[0] * (cs * xi[0] + sn * xi[1]), t[0] * (-sn * xi[0] + cs * xi[1]);
          return eta;
        };
        c.weight = [](const Vec& t) { return 1.0 / (kTwoPi * t[0]); };
      } else {
        c.box_complete = false;
        c.lo = Vec::Constant(1, amin);
        c.hi = Vec::Constant(1, amax);
        const Vec axis = v.interior_point().normalized();
        const double phi = angular_radius(v);
        const double frac = cap_fraction(d, phi);
        c.draw = [xi, amin, amax, axis, phi, frac, n](Rng& rng) {
          const double a = uniform(rng, amin, amax);
          const Vec u = sample_in_cap(rng, axis, phi);
          return std::make_pair(Vec(a * n * u), (amax - amin) * frac / a);
        };
      }
      break;
    }
    case GroupKind::Custom:
      throw InvalidArgument("stay regions are not available for custom groups");
  }
  if (c.box_complete && !c.draw) {
    StayChart copy = c;
    c.draw = [copy](Rng& rng) {
      Vec t(copy.lo.size());
      for (int i = 0; i < t.size(); ++i) t[i] = uniform(rng, copy.lo[i], copy.hi[i]);
      const double vol = (copy.hi - copy.lo).prod();
      return std::make_pair(copy.dual_image(t), vol * copy.weight(t));
    };
  }
  return c;
}

Estimate integrate_stay_gl(const StayChart& chart, const DualIntegrand& f, int panels) {
  if (!chart.box_complete || chart.lo.size() != 2) throw InvalidArgument("integrate_stay_gl needs a 2-dimensional chart");
  const GaussRule& rule = gauss_rule(16);
  auto run = [&](int p) {
    std::vector<double> x0, w0, x1, w1;
    composite_rule(chart.lo[0], chart.hi[0], p, rule, x0, w0);
    composite_rule(chart.lo[1], chart.hi[1], p, rule, x1, w1);
    double total = 0.0;
    Vec t(2);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      double row = 0.0;
      t[0] = x0[i];
      for (std::size_t j = 0; j < x1.size(); ++j) {
        t[1] = x1[j];
        const double fv = f(chart.dual_image(t));
        if (fv != 0.0) row += w1[j] * fv * chart.weight(t);
      }
      total += w0[i] * row;
    }
    return total;
  };
  Estimate e;
  const double coarse = run(panels);
  e.value = run(2 * panels);
  e.stderr_ = std::abs(e.value - coarse);
  e.samples = static_cast<long>(rule.x.size() * rule.x.size()) * 5L * panels * panels;
  return e;
}

Estimate integrate_stay_mc(const StayChart& chart, const DualIntegrand& f, long samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("integrate_stay_mc needs at least 2 samples");
  Rng rng = make_rng(seed, 0x57a1);
  double sum = 0.0, sum_sq = 0.0;
  for (long k = 0; k < samples; ++k) {
    auto [eta, wt] = chart.draw(rng);
    const double val = wt * f(eta);
    sum += val;
    sum_sq += val * val;
  }
  return mean_estimate(sum, sum_sq, samples);
}

Estimate stay_measure(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v, long budget,
                      std::uint64_t seed) {
  if (budget < 2) throw InvalidArgument("stay_measure needs a positive budget");
  StayChart c = stay_chart(group, xi, v);
  return integrate_stay_mc(c, [&v](const Vec& eta) { return v.contains(eta) ? 1.0 : 0.0; }, budget, seed);
}

// ---------------------------------------------------------------- K_o region

namespace {

// Ranges of u_i / u_1 over the patch (interval hull).
std::vector<Interval> slope_bounds(const DirectionPatch& w) {
  Vec ulo, uhi;
  w.coordinate_bounds(ulo, uhi);
  std::vector<Interval> out;
  if (w.kind == PatchKind::ShearletAxisBand) {
    const double t = std::sqrt(2.0 * w.eps - w.eps * w.eps) / (1.0 - w.eps);
    for (int i = 1; i < w.dimension; ++i) out.push_back({-t, t});
    return out;
  }
  for (int i = 1; i < w.dimension; ++i) out.push_back(quotient({ulo[i], uhi[i]}, {ulo[0], uhi[0]}));
  return out;
}

KoRegion shearlet_region(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v, double R,
                         int octaves) {
  const int d = group.dimension();
  const auto& cs = group.spec().anisotropy;
  Vec blo, bhi, ulo, uhi;
  v.bounding_box(blo, bhi);
  w.coordinate_bounds(ulo, uhi);
  const Interval e1{blo[0], bhi[0]};
  const double s_eta = sign_of_interval(e1, "shearlet K_o region (window)");
  const double s_u = sign_of_interval({ulo[0], uhi[0]}, "shearlet K_o region (patch)");
  const double s = s_eta * s_u;
  std::vector<Interval> tau = slope_bounds(w);
  std::vector<Interval> rho;
  for (int i = 1; i < d; ++i) rho.push_back(quotient({blo[i], bhi[i]}, e1));
  double tmax2 = 0.0;
  for (const Interval& t : tau) tmax2 += std::max(t.lo * t.lo, t.hi * t.hi);
  const double amax = abs_interval(e1).hi * std::sqrt(1.0 + tmax2) / R;
  KoRegion r;
  r.scale_max = amax;
  r.octaves = octaves;
  const double amin = amax * std::ldexp(1.0, -octaves);
  r.propose = [&group, cs, d, s, tau, rho, amin, amax, octaves](Rng& rng) {
    const double a = log_uniform(rng, amin, amax);
    Vec p(d + 1);
    p[0] = s;
    p[1] = a;
    double vol = 1.0;
    for (int i = 1; i < d; ++i) {
      const double ac = std::pow(a, cs[i - 1]);
      const double lo = a * rho[i - 1].lo - ac * tau[i - 1].hi;
      const double hi = a * rho[i - 1].hi - ac * tau[i - 1].lo;
      p[1 + i] = uniform(rng, lo, hi);
      vol *= hi - lo;
    }
    KoRegion::Proposal q;
    q.h = group.element(p);
    q.inv_density = std::pow(a, -d) * a * octaves * std::log(2.0) * vol;
    q.octave = std::min(octaves - 1, static_cast<int>(std::floor(std::log2(amax / a))));
    return q;
  };
  return r;
}

KoRegion similitude_region(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v, double R,
                           int octaves) {
  const int d = group.dimension();
  const double amax = v.max_norm() / R;
  const double amin = amax * std::ldexp(1.0, -octaves);
  KoRegion r;
  r.scale_max = amax;
  r.octaves = octaves;
  const double log_len = octaves * std::log(2.0);
  if (d == 2) {
    planar::Arc va = planar::window_arc(v), wa = planar::patch_arc(w);
    const double lo = wa.full() || va.full() ? 0.0 : wa.lo - va.hi();
    const double len = wa.full() || va.full() ? kTwoPi : std::min(kTwoPi, wa.span + va.span);
    r.propose = [&group, amin, amax, lo, len, log_len, octaves](Rng& rng) {
      const double a = log_uniform(rng, amin, amax);
      const double th = lo + uniform01(rng) * len;
      KoRegion::Proposal q;
      q.h = group.element(similitude_params_2d(a, th));
      q.inv_density = log_len * len / kTwoPi;
      q.octave = std::min(octaves - 1, static_cast<int>(std::floor(std::log2(amax / a))));
      return q;
    };
    return r;
  }
  const Vec v0 = v.interior_point().normalized();
  const Vec axis = w.axis();
  const double phi = std::min(kPi, w.enclosing_half_angle() + angular_radius(v));
  const double frac = cap_fraction(d, phi);
  r.propose = [&group, amin, amax, v0, axis, phi, frac, log_len, octaves, d](Rng& rng) {
    (void)d;
    const double a = log_uniform(rng, amin, amax);
    const Vec u = sample_in_cap(rng, axis, phi);
    // theta v0 = u
    Mat theta = rotation_taking(v0, u) * random_rotation_fixing(rng, v0);
    KoRegion::Proposal q;
    q.h = group.element(similitude_params(a, theta));
    q.inv_density = log_len * frac;
    q.octave = std::min(octaves - 1, static_cast<int>(std::floor(std::log2(amax / a))));
    return q;
  };
  return r;
}

KoRegion diagonal_region(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v, double R,
                         int octaves) {
  const int d = group.dimension();
  Vec blo, bhi, ulo, uhi;
  v.bounding_box(blo, bhi);
  w.coordinate_bounds(ulo, uhi);
  std::vector<double> sign_eta(d), sign_u(d);
  std::vector<Interval> abs_eta(d), abs_u(d);
  for (int i = 0; i < d; ++i) {
    sign_eta[i] = sign_of_interval({blo[i], bhi[i]}, "diagonal K_o region (window)");
    sign_u[i] = sign_of_interval({ulo[i], uhi[i]}, "diagonal K_o region (patch)");
    abs_eta[i] = abs_interval({blo[i], bhi[i]});
    abs_u[i] = abs_interval({ulo[i], uhi[i]});
  }
  // |a_i / a_1| = |eta_i / eta_1| / |u_i / u_1|
  std::vector<Interval> diff(d);
  for (int i = 1; i < d; ++i) {
    Interval q = quotient(abs_eta[i], abs_eta[0]);
    Interval uq = quotient(abs_u[i], abs_u[0]);
    diff[i] = {std::log(q.lo) - std::log(uq.hi), std::log(q.hi) - std::log(uq.lo)};
  }
  const double t1max = std::log(abs_eta[0].hi / (R * abs_u[0].lo));
  const double span = octaves * std::log(2.0);
  KoRegion r;
  r.scale_max = std::exp(t1max);
  r.octaves = octaves;
  r.propose = [&group, d, sign_eta, sign_u, diff, t1max, span, octaves](Rng& rng) {
    Vec a(d);
    const double t1 = t1max - uniform01(rng) * span;
    a[0] = sign_eta[0] * sign_u[0] * std::exp(t1);
    double vol = span;
    for (int i = 1; i < d; ++i) {
      const double ti = t1 + uniform(rng, diff[i].lo, diff[i].hi);
      a[i] = sign_eta[i] * sign_u[i] * std::exp(ti);
      vol *= diff[i].length();
    }
    KoRegion::Proposal q;
    q.h = group.element(a);
    q.inv_density = vol;
    q.octave = std::min(octaves - 1, static_cast<int>(std::floor((t1max - t1) / std::log(2.0))));
    return q;
  };
  return r;
}

}  // namespace

KoRegion ko_region(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v, double R,
                   int octaves) {
  if (!(R > 0.0)) throw InvalidArgument("K_o sampling needs R > 0 (the region is unbounded otherwise)");
  if (octaves < 1) throw InvalidArgument("K_o sampling needs at least one octave");
  check_window_in_orbit(group, v);
  switch (group.kind()) {
    case GroupKind::Shearlet: return shearlet_region(group, w, v, R, octaves);
    case GroupKind::Similitude: return similitude_region(group, w, v, R, octaves);
    case GroupKind::Diagonal: return diagonal_region(group, w, v, R, octaves);
    case GroupKind::Custom: break;
  }
  throw InvalidArgument("K_o chart box derivation is not available for custom groups");
}

std::vector<WeightedElement> sample_K_o(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v,
                                        double R, long count, std::uint64_t seed, const KoSamplerOptions& opts) {
  if (count < 0) throw InvalidArgument("sample_K_o: negative count");
  std::vector<WeightedElement> out;
  if (count == 0) return out;
  KoRegion region = ko_region(group, w, v, R, opts.octaves);
  Rng rng = make_rng(seed, 0xC0);
  long proposals = 0;
  out.reserve(count);
  while (static_cast<long>(out.size()) < count) {
    if (++proposals > opts.max_proposals)
      throw NumericalError(fmt::format("sample_K_o: only {} of {} samples after {} proposals", out.size(), count,
                                       opts.max_proposals));
    KoRegion::Proposal q = region.propose(rng);
    Verdict ok = k_o_contains(q.h, w, v, R);
    if (ok.is_true() || (ok.certainty == Certainty::Approximate && ok.confidence >= 0.99)) {
      out.push_back({std::move(q.h), q.inv_density, q.octave});
    }
  }
  for (auto& e : out) e.weight /= static_cast<double>(proposals);
  return out;
}

// ---------------------------------------------------------------- invariance oracle

LocalChart local_chart(const DilationGroup& group) {
  LocalChart c;
  const int d = group.dimension();
  switch (group.kind()) {
    case GroupKind::Similitude:
      if (d != 2) throw InvalidArgument("local similitude chart is only provided for d = 2");
      c.dim = 2;
      c.element = [&group](const Vec& t) { return group.element(similitude_params_2d(t[0], t[1])); };
      c.coords = [](const GroupElement& h) -> std::optional<Vec> {
        Vec t(2);
        t << h.params[0], std::atan2(h.params[3], h.params[1]);
        return t;
      };
      c.density = [](const Vec& t) { return 1.0 / (kTwoPi * t[0]); };
      return c;
    case GroupKind::Diagonal:
      c.dim = d;
      c.element = [&group](const Vec& t) { return group.element(t); };
      c.coords = [](const GroupElement& h) -> std::optional<Vec> { return h.params; };
      c.density = [](const Vec& t) { return 1.0 / t.cwiseAbs().prod(); };
      return c;
    case GroupKind::Shearlet:
      c.dim = d;
      c.element = [&group, d](const Vec& t) {
        Vec p(d + 1);
        p[0] = 1.0;
        p.tail(d) = t;
        return group.element(p);
      };
      c.coords = [](const GroupElement& h) -> std::optional<Vec> {
        if (h.params[0] < 0) return std::nullopt;
        return Vec(h.params.tail(h.params.size() - 1));
      };
      c.density = [d](const Vec& t) { return std::pow(t[0], -d); };
      return c;
    case GroupKind::Custom: {
      const auto& ch = *group.spec().custom;
      c.dim = ch.param_dim;
      c.element = [&group](const Vec& t) { return group.element(t); };
      c.coords = [](const GroupElement& h) -> std::optional<Vec> { return h.params; };
      c.density = ch.haar_density;
      return c;
    }
  }
  throw InvalidArgument("unknown group kind");
}

InvarianceCheck haar_invariance_check(const DilationGroup& group, const Vec& box_lo, const Vec& box_hi,
                                      const GroupElement& g0, long samples, std::uint64_t seed) {
  LocalChart c = local_chart(group);
  if (box_lo.size() != c.dim || box_hi.size() != c.dim) throw InvalidArgument("invariance box has wrong dimension");
  Rng rng = make_rng(seed, 0x1A);
  auto in_box = [&](const Vec& t) {
    for (int i = 0; i < c.dim; ++i)
      if (!(t[i] >= box_lo[i] && t[i] <= box_hi[i])) return false;
    return true;
  };
  auto draw_box = [&](const Vec& lo, const Vec& hi) {
    Vec t(c.dim);
    for (int i = 0; i < c.dim; ++i) t[i] = uniform(rng, lo[i], hi[i]);
    return t;
  };
  // mu(S)
  const double vol_s = (box_hi - box_lo).prod();
  double sum = 0, sum_sq = 0;
  for (long k = 0; k < samples; ++k) {
    const double v = vol_s * c.density(draw_box(box_lo, box_hi));
    sum += v;
    sum_sq += v * v;
  }
  InvarianceCheck out;
  out.measure_s = mean_estimate(sum, sum_sq, samples);
  // A box B containing g0 S: images of corners and random points, padded.
  Vec blo = Vec::Constant(c.dim, std::numeric_limits<double>::infinity());
  Vec bhi = -blo;
  auto grow = [&](const Vec& t) {
    auto img = c.coords(group.compose(g0, c.element(t)));
    if (!img) throw InvalidArgument("g0 leaves the local chart");
    blo = blo.cwiseMin(*img);
    bhi = bhi.cwiseMax(*img);
  };
  for (int mask = 0; mask < (1 << c.dim); ++mask) {
    Vec t(c.dim);
    for (int i = 0; i < c.dim; ++i) t[i] = (mask >> i) & 1 ? box_hi[i] : box_lo[i];
    grow(t);
  }
  for (int k = 0; k < 4000; ++k) grow(draw_box(box_lo, box_hi));
  const Vec pad = 0.05 * (bhi - blo);
  blo -= pad;
  bhi += pad;
  const GroupElement g0inv = group.inverse(g0);
  const double vol_b = (bhi - blo).prod();
  sum = sum_sq = 0;
  for (long k = 0; k < samples; ++k) {
    Vec t = draw_box(blo, bhi);
    if (group.kind() == GroupKind::Diagonal && (t.array() == 0.0).any()) continue;
    if (group.kind() != GroupKind::Diagonal && !(t[0] > 0)) continue;
    auto pre = c.coords(group.compose(g0inv, c.element(t)));
    if (!pre || !in_box(*pre)) continue;
    const double v = vol_b * c.density(t);
    sum += v;
    sum_sq += v * v;
  }
  out.measure_gs = mean_estimate(sum, sum_sq, samples);
  const double se = std::hypot(out.measure_s.stderr_, out.measure_gs.stderr_);
  out.z = se > 0 ? std::abs(out.measure_s.value - out.measure_gs.value) / se : 0.0;
  return out;
}

}  // namespace wf
