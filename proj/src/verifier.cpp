#include "wavefront/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace wf {

namespace {

bool accepted(const Verdict& v) { return v.is_true() || (v.certainty == Certainty::Approximate && v.confidence >= 0.99); }

bool in_set(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v, double R, bool use_ki) {
  if (!accepted(k_o_contains(h, w, v, R))) return false;
  return !use_ki || k_i_contains(h, w, v, R).passes();
}

std::vector<GroupElement> draw_set(const DilationGroup& group, const DirectionPatch& w, const FrequencyWindow& v,
                                   double R, long n, bool use_ki, std::uint64_t seed, int octaves,
                                   std::vector<int>* octave_of = nullptr) {
  KoSamplerOptions opts;
  opts.octaves = octaves;
  std::vector<GroupElement> out;
  out.reserve(n);
  for (int batch = 0; batch < 64 && static_cast<long>(out.size()) < n; ++batch) {
    const long want = n - static_cast<long>(out.size());
    auto s = sample_K_o(group, w, v, R, use_ki ? std::max<long>(want, 1000) : want, mix_seed(seed, batch), opts);
    for (auto& e : s) {
      if (static_cast<long>(out.size()) >= n) break;
      if (use_ki && !k_i_contains(e.h, w, v, R).passes()) continue;
      if (octave_of) octave_of->push_back(e.octave);
      out.push_back(std::move(e.h));
    }
    if (!use_ki) break;
  }
  if (out.empty()) throw NumericalError("no elements found in the requested set");
  return out;
}

double inverse_norm(const GroupElement& h) { return operator_norm(h.inv_matrix); }

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw NumericalError("norm fit: samples do not spread in scale");
  return sxy / sxx;
}

// Random nearby element in the chart; nullopt when the group has no such move.
std::optional<GroupElement> perturb(const DilationGroup& group, const GroupElement& h, double sigma, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vec p = h.params;
  switch (group.kind()) {
    case GroupKind::Similitude: p[0] *= std::exp(sigma * z(rng)); break;
    case GroupKind::Diagonal:
      for (int i = 0; i < p.size(); ++i) p[i] *= std::exp(sigma * z(rng));
      break;
    case GroupKind::Shearlet: {
      const auto& c = group.spec().anisotropy;
      const double a = p[1];
      p[1] *= std::exp(sigma * z(rng));
      for (int i = 2; i < p.size(); ++i) p[i] += sigma * z(rng) * (std::abs(p[i]) + std::pow(a, c[i - 2]));
      break;
    }
    case GroupKind::Custom: return std::nullopt;
  }
  if (!group.params_in_domain(p)) return std::nullopt;
  return group.element(p);
}

// A point of V strictly inside, near q, whose image leaves C(W,R).
std::optional<Vec> interior_violation(const GroupElement& h, const DirectionPatch& w, const FrequencyWindow& v,
                                      double R) {
  std::optional<Vec> q = find_violating_point(h, w, v, R);
  if (!q) return std::nullopt;
  const Vec c = v.interior_point();
  for (double t : {0.0, 1e-12, 1e-9, 1e-7, 1e-5, 1e-3, 1e-2}) {
    const Vec p = *q + t * (c - *q);
    if (v.contains(p) && !cone_contains(w, R, h.inv_transpose * p)) return p;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- norm estimates

MicrolocalFit fit_alpha1(const DilationGroup& group, const DirectionPatch& w0, const FrequencyWindow& v, double R0,
                         long n_samples, bool use_ki, const FitOptions& opts) {
  if (n_samples < 3) throw InvalidArgument("fit_alpha1 needs at least 3 samples");
  MicrolocalFit fit;
  fit.w0 = w0;
  fit.v = v;
  fit.R0 = R0;
  fit.use_ki = use_ki;
  fit.octaves = opts.octaves;
  fit.scale_max = ko_region(group, w0, v, R0, opts.octaves).scale_max;
  std::vector<int> octave;
  auto hs = draw_set(group, w0, v, R0, n_samples, use_ki, opts.seed, opts.octaves, &octave);
  fit.sample_count = static_cast<long>(hs.size());

  std::vector<double> lx(hs.size()), ly(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    lx[i] = std::log(hs[i].op_norm);
    ly[i] = std::log(inverse_norm(hs[i]));
    fit.max_norm = std::max(fit.max_norm, hs[i].op_norm);
  }
  fit.regression_slope = -ls_slope(lx, ly);

  if (opts.fixed_alpha1) {
    fit.alpha1 = *opts.fixed_alpha1;
  } else {
    // Upper envelope: the worst sample per octave.
    const int nb = *std::max_element(octave.begin(), octave.end()) + 1;
    std::vector<int> worst(nb, -1);
    for (std::size_t i = 0; i < hs.size(); ++i) {
      int& w = worst[octave[i]];
      if (w < 0 || ly[i] + fit.regression_slope * lx[i] > ly[w] + fit.regression_slope * lx[w]) w = static_cast<int>(i);
    }
    std::vector<double> ex, ey;
    for (int w : worst)
      if (w >= 0) {
        ex.push_back(lx[w]);
        ey.push_back(ly[w]);
      }
    fit.alpha1 = ex.size() >= 2 ? -ls_slope(ex, ey) : fit.regression_slope;
  }

  std::vector<double> ratio(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) ratio[i] = ly[i] + fit.alpha1 * lx[i];
  fit.C = std::exp(*std::max_element(ratio.begin(), ratio.end()));

  if (opts.refine_envelope) {
    const double smin = fit.scale_max * std::ldexp(1.0, -opts.octaves);
    std::vector<std::size_t> order(hs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t top = std::min<std::size_t>(16, hs.size());
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });
    Rng rng = make_rng(opts.seed, 0xE1);
    for (std::size_t t = 0; t < top; ++t) {
      GroupElement cur = hs[order[t]];
      double best = ratio[order[t]];
      for (int step = 0; step < 300; ++step) {
        const double sigma = 0.2 * std::pow(0.985, step);
        auto cand = perturb(group, cur, sigma, rng);
        if (!cand) break;
        const double s = group.scale_of(*cand);
        if (s < smin || s > fit.scale_max) continue;
        const double r = std::log(inverse_norm(*cand)) + fit.alpha1 * std::log(cand->op_norm);
        if (r > best && in_set(*cand, w0, v, R0, use_ki)) {
          best = r;
          cur = std::move(*cand);
        }
      }
      fit.C = std::max(fit.C, std::exp(best));
    }
  }
  return fit;
}

EnvelopeCheck check_envelope(const DilationGroup& group, const MicrolocalFit& fit, long n_samples, double factor,
                             std::uint64_t seed) {
  EnvelopeCheck out;
  auto hs = draw_set(group, fit.w0, fit.v, fit.R0, n_samples, fit.use_ki, seed, fit.octaves);
  for (const auto& h : hs) {
    const double r = inverse_norm(h) * std::pow(h.op_norm, fit.alpha1) / fit.C;
    out.worst_ratio = std::max(out.worst_ratio, r);
    if (r > factor) ++out.violations;
  }
  out.tested = static_cast<long>(hs.size());
  return out;
}

std::string to_string(IntegralStatus s) {
  switch (s) {
    case IntegralStatus::Stable: return "Stable";
    case IntegralStatus::Unstable: return "Unstable";
    case IntegralStatus::NotIntegrable: return "NotIntegrable";
  }
  return "?";
}

NormPowerIntegral norm_power_integral(const DilationGroup& group, const DirectionPatch& w0, const FrequencyWindow& v,
                                      double R0, double alpha2, long budget, std::uint64_t seed, int octaves) {
  if (!(alpha2 > 0.0)) throw InvalidArgument("norm_power_integral: alpha2 must be positive");
  if (budget < 1) throw InvalidArgument("norm_power_integral: budget must be positive");
  const KoRegion region = ko_region(group, w0, v, R0, octaves);
  std::vector<double> shells(octaves, 0.0);
  auto run = [&](long n, std::uint64_t s, bool keep_shells) {
    Rng rng = make_rng(s, 0x1A);
    double sum = 0.0, sumsq = 0.0;
    for (long j = 0; j < n; ++j) {
      KoRegion::Proposal q = region.propose(rng);
      if (!accepted(k_o_contains(q.h, w0, v, R0))) continue;
      const double x = q.inv_density * std::pow(q.h.op_norm, alpha2);
      sum += x;
      sumsq += x * x;
      if (keep_shells) shells[std::clamp(q.octave, 0, octaves - 1)] += x;
    }
    Estimate e;
    e.samples = n;
    e.value = sum / n;
    e.stderr_ = std::sqrt(std::max(0.0, sumsq / n - e.value * e.value) / n);
    return e;
  };
  NormPowerIntegral out;
  out.alpha2 = alpha2;
  out.estimate = run(budget, mix_seed(seed, 1), false);
  out.check = run(4 * budget, mix_seed(seed, 2), true);
  for (double& s : shells) s /= static_cast<double>(4 * budget);
  out.octave_contributions = shells;
  const double total = std::accumulate(shells.begin(), shells.end(), 0.0);
  const int tail_n = std::max(1, octaves / 4);
  const double tail = std::accumulate(shells.end() - tail_n, shells.end(), 0.0);
  const double z = std::abs(out.check.value - out.estimate.value) /
                   std::max(std::hypot(out.check.stderr_, out.estimate.stderr_), 1e-300);
  if (total > 0.0 && tail > 0.05 * total) {
    out.status = IntegralStatus::NotIntegrable;
    out.note = fmt::format("finest {} octaves carry {:.1f}% of the estimate", tail_n, 100.0 * tail / total);
  } else if (z > 3.0) {
    out.status = IntegralStatus::Unstable;
    out.note = fmt::format("4x budget moved the estimate by {:.2f} standard errors", z);
  } else {
    out.status = IntegralStatus::Stable;
    out.note = fmt::format("4x budget agrees within {:.2f} standard errors", z);
  }
  return out;
}

// ---------------------------------------------------------------- cone approximation

std::string to_string(ConeMode m) { return m == ConeMode::Strong ? "Strong" : "Weak"; }

std::string to_string(ConeStatus s) {
  switch (s) {
    case ConeStatus::HoldsWitness: return "HoldsWitness";
    case ConeStatus::FailsCounterexample: return "FailsCounterexample";
    case ConeStatus::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

FrequencyWindow family_window(const ConeApproxRequest& req, int n) {
  const int d = req.w.dimension;
  switch (req.family) {
    case WindowFamily::Fixed: return req.v0;
    case WindowFamily::SimilitudeBalls: return FrequencyWindow::ball(req.xi / req.xi.norm(), 1.0 / n);
    case WindowFamily::DiagonalSectors:
      return FrequencyWindow::annulus_sector(n / (n + 1.0), (n + 1.0) / n, DirectionPatch::diagonal_band(d, 1.0 / n));
    case WindowFamily::Custom:
      if (!req.custom_family) throw InvalidArgument("custom window family without a generator");
      return req.custom_family(n);
  }
  throw InvalidArgument("unknown window family");
}

std::optional<bool> cone_closed_form(const DilationGroup& group, const ConeApproxRequest& req,
                                     const DirectionPatch& w_prime, double R_prime, int n) {
  const double eps = req.w.size(), ep = w_prime.size(), R = req.R;
  switch (group.kind()) {
    case GroupKind::Shearlet: {
      if (req.family != WindowFamily::Fixed || req.w.kind != PatchKind::ShearletAxisBand ||
          req.v0.kind != WindowKind::ShearletBox || w_prime.kind != PatchKind::ShearletAxisBand)
        return std::nullopt;
      const auto& cs = group.spec().anisotropy;
      const double c = *std::max_element(cs.begin(), cs.end());
      const double lhs = 2.0 * std::sqrt(2.0 * ep - ep * ep) / (1.0 - ep) + 2.0 * std::pow(4.0, 1.0 - c) *
                                                                                std::pow(R_prime, c - 1.0);
      const double rhs = std::sqrt(2.0 * eps - eps * eps) / (1.0 - eps);
      return R_prime > std::max(4.0, 4.0 * R) && lhs < rhs;
    }
    case GroupKind::Similitude: {
      if (req.family != WindowFamily::SimilitudeBalls || req.w.kind != PatchKind::SphericalCap ||
          w_prime.kind != PatchKind::SphericalCap)
        return std::nullopt;
      if ((req.w.center - req.xi / req.xi.norm()).norm() > 1e-12) return std::nullopt;
      return n >= 2 && ep < eps / 2 && 4.0 / (n - 1) < eps / 2 && (n - 1.0) * R_prime / (n + 1.0) > R;
    }
    case GroupKind::Diagonal: {
      if (req.family != WindowFamily::DiagonalSectors || req.w.kind != PatchKind::DiagonalBand ||
          w_prime.kind != PatchKind::DiagonalBand)
        return std::nullopt;
      const double q = (n + 1.0) / n;
      return (1 + ep) * (1 + ep) * std::pow(q, 8) < 1 + eps && std::pow(1.0 / q, 4) * R_prime > R;
    }
    case GroupKind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

DirectionPatch obstruction_patch(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v0) {
  Rng rng = make_rng(0, 0x0B);
  const Vec u = xi / xi.norm();
  const GroupElement hx = group.solve_dual(u, v0.interior_point(), rng);
  std::vector<Vec> dirs;
  for (const Vec& p : v0.certificate_points()) {
    const Vec q = hx.inv_transpose * p;
    if (q.norm() > 0) dirs.push_back(q / q.norm());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j) s = std::max(s, (dirs[i] - dirs[j]).norm());
  if (!(s > 0.0)) throw DomainError("obstruction_patch: window image has no directional spread");
  return DirectionPatch::cap(u, s / 2);
}

namespace {

struct Candidate {
  int m, k, j;  // n = 2^m, eps' = eps / 2^k, R' = R 2^j
};

std::vector<Candidate> candidate_grid(ConeMode mode, int max_k) {
  std::vector<Candidate> out;
  const int m_lo = mode == ConeMode::Weak ? 1 : 0;
  const int m_hi = mode == ConeMode::Weak ? max_k : 0;
  for (int s = 0; s <= 3 * max_k; ++s)
    for (int m = m_lo; m <= m_hi; ++m)
      for (int k = 0; k <= max_k; ++k) {
        const int j = s - m - k;
        if (j >= 0 && j <= max_k) out.push_back({m, k, j});
      }
  return out;
}

// Samples K_o(W',V,R') and tests each element against K_i(W,V,R).
std::optional<ConeCounterexample> sample_inclusion(const DilationGroup& group, const ConeApproxRequest& req,
                                                   const DirectionPatch& wp, double Rp, int n,
                                                   const FrequencyWindow& v, long budget, std::uint64_t seed,
                                                   long& tested) {
  KoSamplerOptions opts;
  opts.octaves = req.octaves;
  const auto hs = sample_K_o(group, wp, v, Rp, budget, seed, opts);
  for (const auto& e : hs) {
    ++tested;
    if (k_i_contains(e.h, req.w, v, req.R).passes()) continue;
    ConeCounterexample cx;
    cx.h = e.h;
    cx.w_prime = wp;
    cx.R_prime = Rp;
    cx.n = n;
    if (auto q = interior_violation(e.h, req.w, v, req.R)) {
      cx.xi_prime = *q;
      cx.image = e.h.inv_transpose * *q;
      cx.failed_test = "k_i_contains: image leaves C(W,R)";
    } else {
      cx.xi_prime = v.interior_point();
      cx.image = e.h.inv_transpose * cx.xi_prime;
      cx.failed_test = "k_i_contains: inclusion not certified";
    }
    return cx;
  }
  return std::nullopt;
}

}  // namespace

ConeApproxVerdict check_cone_approx(const DilationGroup& group, ConeMode mode, const ConeApproxRequest& req) {
  if (req.budget <= 0) throw InvalidArgument("check_cone_approx: budget must be positive");
  if (!group.in_open_orbit(req.xi)) throw DomainError("check_cone_approx: direction outside the open orbit");
  if (mode == ConeMode::Strong && req.family != WindowFamily::Fixed)
    throw InvalidArgument("strong mode uses a single window V_0");
  ConeApproxVerdict out;
  out.mode = mode;
  const Vec xi = req.xi / req.xi.norm();
  const bool scalars = group.contains_positive_scalar_dilations();

  for (const Candidate& c : candidate_grid(mode, req.max_k)) {
    const int n = 1 << c.m;
    const DirectionPatch wp = req.w.resized(std::ldexp(req.w.size(), -c.k));
    const double Rp = std::ldexp(req.R, c.j);
    const FrequencyWindow v = family_window(req, n);
    ++out.candidates_tested;

    if (mode == ConeMode::Strong && scalars) {
      // h = alpha h_xi meets C(W',R') at alpha^{-1} xi for every W' around xi.
      Rng rng = make_rng(req.seed, 0x5C);
      const GroupElement hx = group.solve_dual(xi, v.interior_point(), rng);
      const double alpha = 0.5 / (1.0 + Rp);
      const GroupElement h = group.compose(*group.scalar_dilation(alpha), hx);
      if (accepted(k_o_contains(h, wp, v, Rp))) {
        if (auto q = interior_violation(h, req.w, v, req.R)) {
          ConeCounterexample cx{h, *q, h.inv_transpose * *q, "k_i_contains: scaled copy of h_xi", wp, Rp, n};
          out.counterexample = std::move(cx);
          continue;
        }
      }
    }

    const std::optional<bool> cf = cone_closed_form(group, req, wp, Rp, n);
    if (cf && !*cf) continue;
    long tested = 0;
    std::optional<ConeCounterexample> cx;
    if (!cf) {
      // No closed form: a cheap screen before the full budget.
      cx = sample_inclusion(group, req, wp, Rp, n, v, std::min<long>(1000, req.budget),
                            mix_seed(req.seed, 2 * out.candidates_tested), tested);
    }
    if (!cx)
      cx = sample_inclusion(group, req, wp, Rp, n, v, req.budget, mix_seed(req.seed, 2 * out.candidates_tested + 1),
                            tested);
    out.samples_tested += tested;
    if (cx) {
      out.log.push_back(fmt::format("candidate eps'={:.4g} R'={:.4g} n={}: counterexample after {} samples",
                                    wp.size(), Rp, n, tested));
      out.counterexample = std::move(cx);
      continue;
    }
    out.log.push_back(fmt::format("candidate eps'={:.4g} R'={:.4g} n={}: {} samples, no counterexample", wp.size(),
                                  Rp, n, tested));
    out.status = ConeStatus::HoldsWitness;
    out.witness = ConeWitness{wp, Rp, n, cf};
    return out;
  }
  if (out.counterexample) {
    out.status = ConeStatus::FailsCounterexample;
    out.log.push_back(fmt::format("{} candidates refuted", out.candidates_tested));
  } else {
    out.status = ConeStatus::BudgetExhausted;
  }
  return out;
}

bool verify_counterexample(const DilationGroup& group, const ConeApproxRequest& req, const ConeCounterexample& cx) {
  if (cx.h.dimension() != group.dimension()) return false;
  const FrequencyWindow v = family_window(req, std::max(cx.n, 1));
  if (!accepted(k_o_contains(cx.h, cx.w_prime, v, cx.R_prime))) return false;
  if (!v.contains(cx.xi_prime)) return false;
  const Vec img = cx.h.inv_transpose * cx.xi_prime;
  if ((img - cx.image).norm() > 1e-10 * std::max(1.0, img.norm())) return false;
  return !cone_contains(req.w, req.R, img);
}

// ---------------------------------------------------------------- geometric equivalence

std::optional<GroupElement> c_set_contains(const DilationGroup& group, const DirectionPatch& w,
                                           const FrequencyWindow& v, double R, const Vec& zeta, Rng& rng,
                                           int tries) {
  if (!group.in_open_orbit(zeta)) return std::nullopt;
  for (int t = 0; t < tries; ++t) {
    const Vec eta = t == 0 ? v.interior_point() : v.sample(rng);
    GroupElement h = group.solve_dual(zeta, eta, rng);
    if (k_i_contains(h, w, v, R).passes()) return h;
  }
  return std::nullopt;
}

GeometricEquivalenceReport check_geometric_equivalence(const DilationGroup& group, const DirectionPatch& w,
                                                       const DirectionPatch& w_prime, const FrequencyWindow& v,
                                                       double R, double R_prime, long budget, std::uint64_t seed,
                                                       int octaves) {
  GeometricEquivalenceReport rep;
  if (budget <= 0) return rep;
  KoSamplerOptions opts;
  opts.octaves = octaves;
  const auto hs = sample_K_o(group, w_prime, v, R_prime, budget, seed, opts);
  Rng rng = make_rng(seed, 0x6E);
  for (const auto& e : hs) {
    ++rep.k_samples;
    if (!k_i_contains(e.h, w, v, R).passes()) {
      ++rep.k_violations;
      // The image of a violating point lies in C_o(W',V,R') but not in C(W,R),
      // hence not in C_i(W,V,R;H).
      if (auto q = interior_violation(e.h, w, v, R)) ++rep.converse_confirmed;
    }
    const Vec zeta = e.h.inv_transpose * v.sample(rng);
    ++rep.c_samples;
    if (!c_set_contains(group, w, v, R, zeta, rng)) ++rep.c_violations;
  }
  const bool k_ok = rep.k_violations == 0, c_ok = rep.c_violations == 0;
  rep.consistent = k_ok == c_ok && (k_ok || rep.converse_confirmed > 0);
  if (!k_ok)
    rep.findings.push_back(fmt::format("K-inclusion fails on {} of {} elements ({} confirmed by a C-point)",
                                       rep.k_violations, rep.k_samples, rep.converse_confirmed));
  if (!c_ok)
    rep.findings.push_back(
        fmt::format("C-inclusion fails (or is not certified) on {} of {} points", rep.c_violations, rep.c_samples));
  if (!rep.consistent) rep.findings.push_back("K- and C-inclusions disagree");
  return rep;
}

// ---------------------------------------------------------------- anisotropy

AnisotropyVerdict anisotropy_gate(const DilationGroup& group) {
  if (group.contains_positive_scalar_dilations())
    return {false,
            "strong cone approximation impossible; single-wavelet characterization unavailable; use weak/multi-wavelet "
            "mode"};
  return {true, "strong mode permitted"};
}

}  // namespace wf
