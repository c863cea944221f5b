#include "wavefront/report.hpp"

#include <fstream>

#include <fmt/format.h>

namespace wf {

using nlohmann::json;

json provenance(const RunConfig& cfg) {
  return {{"version", WAVEFRONT_VERSION}, {"config_hash", cfg.hash}, {"seed", cfg.seed}};
}

std::string provenance_line(const RunConfig& cfg) {
  return fmt::format("wavefront {} config_hash {} seed {}", WAVEFRONT_VERSION, cfg.hash, cfg.seed);
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const GroupElement& h) {
  json m = json::array();
  for (Eigen::Index i = 0; i < h.matrix.rows(); ++i) m.push_back(to_json(Vec(h.matrix.row(i).transpose())));
  return {{"params", to_json(h.params)}, {"matrix", m}, {"norm", h.op_norm}, {"det", h.det}};
}

json to_json(const DirectionPatch& p) {
  json j = {{"kind", to_string(p.kind)}};
  if (p.kind == PatchKind::SphericalCap) {
    j["center"] = to_json(p.center);
    j["radius"] = p.radius;
  } else {
    j["eps"] = p.eps;
  }
  return j;
}

json to_json(const FrequencyWindow& w) {
  json j = {{"kind", to_string(w.kind)}};
  switch (w.kind) {
    case WindowKind::Ball:
      j["center"] = to_json(w.center);
      j["radius"] = w.radius;
      break;
    case WindowKind::Box:
      j["lo"] = to_json(w.lo);
      j["hi"] = to_json(w.hi);
      break;
    case WindowKind::ShearletBox: j["dimension"] = w.dimension; break;
    case WindowKind::AnnulusSector:
      j["r_min"] = w.r_min;
      j["r_max"] = w.r_max;
      if (w.sector) j["patch"] = to_json(*w.sector);
      break;
  }
  return j;
}

json to_json(const Estimate& e) { return {{"value", e.value}, {"stderr", e.stderr_}, {"samples", e.samples}}; }

json to_json(const MicrolocalFit& f) {
  return {{"W0", to_json(f.w0)},
          {"V", to_json(f.v)},
          {"R0", f.R0},
          {"set", f.use_ki ? "K_i" : "K_o"},
          {"alpha1", f.alpha1},
          {"regression_slope", f.regression_slope},
          {"C", f.C},
          {"max_norm", f.max_norm},
          {"sample_count", f.sample_count},
          {"octaves", f.octaves}};
}

json to_json(const EnvelopeCheck& c) {
  return {{"tested", c.tested}, {"violations", c.violations}, {"worst_ratio", c.worst_ratio}};
}

json to_json(const NormPowerIntegral& n) {
  return {{"alpha2", n.alpha2},
          {"estimate", to_json(n.estimate)},
          {"check_4x", to_json(n.check)},
          {"octave_contributions", n.octave_contributions},
          {"status", to_string(n.status)},
          {"note", n.note}};
}

json to_json(const ConeApproxVerdict& v) {
  json j = {{"mode", to_string(v.mode)},
            {"status", to_string(v.status)},
            {"samples_tested", v.samples_tested},
            {"candidates_tested", v.candidates_tested},
            {"log", v.log}};
  if (v.witness) {
    j["witness"] = {{"W_prime", to_json(v.witness->w_prime)}, {"R_prime", v.witness->R_prime}, {"n", v.witness->n}};
    j["witness"]["closed_form"] = v.witness->closed_form ? json(*v.witness->closed_form) : json(nullptr);
  }
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    j["counterexample"] = {{"h", to_json(c.h)},           {"xi_prime", to_json(c.xi_prime)},
                           {"image", to_json(c.image)},   {"failed_test", c.failed_test},
                           {"W_prime", to_json(c.w_prime)}, {"R_prime", c.R_prime},
                           {"n", c.n}};
  }
  return j;
}

json to_json(const GeometricEquivalenceReport& r) {
  return {{"k_samples", r.k_samples},       {"k_violations", r.k_violations},
          {"c_samples", r.c_samples},       {"c_violations", r.c_violations},
          {"converse_confirmed", r.converse_confirmed}, {"consistent", r.consistent},
          {"findings", r.findings}};
}

json to_json(const DecayReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"norm", s.norm},
                       {"coeff", s.coeff},
                       {"error", s.error},
                       {"floor", s.floor},
                       {"below_floor", s.below_floor},
                       {"tier", s.tier == Tier::Ki ? "Ki" : "Ko"}});
  json j = {{"x", to_json(r.x)},         {"xi", to_json(r.xi)},         {"verdict", to_string(r.verdict)},
            {"fitted", r.fitted},        {"floor_hit", r.floor_hit},    {"permuted", r.permuted},
            {"note", r.note},            {"samples", samples}};
  j["slope"] = r.fitted ? json(r.slope) : json(nullptr);
  j["residual"] = r.fitted ? json(r.residual) : json(nullptr);
  return j;
}

json scan_summary(const ScanResult& s) {
  long counts[4] = {0, 0, 0, 0};
  long permuted = 0;
  for (std::size_t i = 0; i < s.verdicts.size(); ++i) {
    ++counts[static_cast<int>(s.verdicts[i])];
    permuted += s.permuted[i] ? 1 : 0;
  }
  return {{"points", s.points.size()},
          {"directions", s.directions.size()},
          {"counts",
           {{"Regular", counts[0]}, {"Singular", counts[1]}, {"Inconclusive", counts[2]}, {"Unresolvable", counts[3]}}},
          {"permuted_cells", permuted},
          {"warnings", s.warnings}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << j.dump(2) << '\n';
}

}  // namespace wf
