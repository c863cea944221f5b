#include "wavefront/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace wf {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what, std::string field, int line, int column)
    : Error(what), field_(std::move(field)), line_(line), column_(column) {}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// misspelt keys are reported instead of silently ignored.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const std::string f = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    throw ConfigError(fmt::format("{}: {}", f.empty() ? "<root>" : f, msg), f);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing required field");
    return j_.at(key);
  }

  Section sub(const std::string& key) { return Section(raw(key), at(key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : def; }

  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) fail(key, fmt::format("must be positive (got {})", x));
    return x;
  }
  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0.0)) fail(key, fmt::format("must be positive (got {})", x));
    return x;
  }

  long integer(const std::string& key, long def, long min_value) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const long x = v.get<long>();
    if (x < min_value) fail(key, fmt::format("must be at least {} (got {})", min_value, x));
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) { return has(key) ? string(key) : def; }

  Vec vector(const std::string& key, int dim) {
    const json& v = raw(key);
    if (!v.is_array()) fail(key, "expected an array of numbers");
    if (dim > 0 && static_cast<int>(v.size()) != dim) fail(key, fmt::format("expected {} entries", dim));
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, "expected an array of numbers");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  Mat matrix(const std::string& key, int dim) {
    const json& v = raw(key);
    if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(key, fmt::format("expected {} rows", dim));
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim) fail(key, fmt::format("expected {} columns", dim));
      for (int j = 0; j < dim; ++j) {
        if (!v[i][j].is_number()) fail(key, "expected numbers");
        m(i, j) = v[i][j].get<double>();
      }
    }
    return m;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(k, "unknown field");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec unit(int d, int i) {
  Vec e = Vec::Zero(d);
  e[i] = 1.0;
  return e;
}

// Wraps library validation errors with the field they came from.
template <class F>
auto checked(Section& s, const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    s.fail(key, e.what());
  }
}

DirectionPatch parse_patch(Section s, int d) {
  const std::string kind = s.string("kind");
  DirectionPatch p;
  if (kind == "cap") {
    const Vec c = s.vector("center", d);
    const double r = s.positive("radius");
    p = checked(s, "center", [&] { return DirectionPatch::cap(c, r); });
  } else if (kind == "axis_band") {
    const double e = s.positive("eps");
    p = checked(s, "eps", [&] { return DirectionPatch::axis_band(d, e); });
  } else if (kind == "diagonal_band") {
    const double e = s.positive("eps");
    p = checked(s, "eps", [&] { return DirectionPatch::diagonal_band(d, e); });
  } else {
    s.fail("kind", "expected cap, axis_band or diagonal_band");
  }
  s.finish();
  return p;
}

FrequencyWindow parse_window(Section s, int d) {
  const std::string kind = s.string("kind");
  FrequencyWindow w;
  if (kind == "ball") {
    const Vec c = s.vector("center", d);
    const double r = s.positive("radius");
    w = checked(s, "radius", [&] { return FrequencyWindow::ball(c, r); });
  } else if (kind == "box") {
    const Vec lo = s.vector("lo", d), hi = s.vector("hi", d);
    w = checked(s, "hi", [&] { return FrequencyWindow::box(lo, hi); });
  } else if (kind == "shearlet_box") {
    w = FrequencyWindow::shearlet_box(d);
  } else if (kind == "annulus_sector") {
    const double a = s.positive("r_min"), b = s.positive("r_max");
    const DirectionPatch p = parse_patch(s.sub("patch"), d);
    w = checked(s, "r_max", [&] { return FrequencyWindow::annulus_sector(a, b, p); });
  } else {
    s.fail("kind", "expected ball, box, shearlet_box or annulus_sector");
  }
  checked(s, "kind", [&] {
    w.validate();
    return 0;
  });
  s.finish();
  return w;
}

SignalSpec parse_signal(Section s, int d, const std::string& base_dir) {
  const std::string kind = s.string("kind");
  SignalSpec out;
  if (kind == "point_mass") {
    const Vec x0 = s.vector("x0", d);
    out.object = AnalysedObject::point_mass(x0);
  } else if (kind == "hyperplane") {
    const Vec n = s.vector("normal", d);
    const Vec o = s.has("offset") ? s.vector("offset", d) : Vec::Zero(d);
    out.object = checked(s, "normal", [&] { return AnalysedObject::hyperplane(n, o); });
  } else if (kind == "gaussian") {
    const Vec c = s.has("center") ? s.vector("center", d) : Vec::Zero(d);
    const Mat cov = s.matrix("covariance", d);
    out.object = checked(s, "covariance", [&] { return AnalysedObject::gaussian(c, cov); });
  } else if (kind == "grid") {
    std::filesystem::path p = s.string("path");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    out.grid_path = p.string();
    auto g = checked(s, "path", [&] { return std::make_shared<const GridSignal>(read_grid(out.grid_path)); });
    if (g->dimension() != d) s.fail("path", "grid dimension differs from group dimension");
    out.object = AnalysedObject::grid_signal(std::move(g));
  } else {
    s.fail("kind", "expected point_mass, hyperplane, gaussian or grid");
  }
  s.finish();
  return out;
}

void verifier_defaults(VerifierSpec& v, const DilationGroupSpec& g) {
  const int d = g.dimension;
  switch (g.kind) {
    case GroupKind::Shearlet:
    case GroupKind::Custom:
      v.mode = ConeMode::Strong;
      v.xi = unit(d, 0);
      v.patch = DirectionPatch::axis_band(d, 0.3);
      v.R = 10.0;
      v.family = WindowFamily::Fixed;
      v.w0 = DirectionPatch::axis_band(d, 0.3);
      v.R0 = 5.0;
      break;
    case GroupKind::Similitude:
      v.mode = ConeMode::Weak;
      v.xi = unit(d, 0);
      v.patch = DirectionPatch::cap(v.xi, 0.5);
      v.R = 2.0;
      v.family = WindowFamily::SimilitudeBalls;
      v.w0 = DirectionPatch::cap(v.xi, 0.5);
      v.R0 = 2.0;
      break;
    case GroupKind::Diagonal:
      v.mode = ConeMode::Weak;
      v.xi = Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
      v.patch = DirectionPatch::diagonal_band(d, 0.5);
      v.R = 2.0;
      v.family = WindowFamily::DiagonalSectors;
      v.w0 = DirectionPatch::diagonal_band(d, 1.0);
      v.R0 = 1.0;
      break;
  }
}

FrequencyWindow default_window(const DilationGroupSpec& g) {
  const int d = g.dimension;
  switch (g.kind) {
    case GroupKind::Shearlet: return FrequencyWindow::shearlet_box(d);
    case GroupKind::Similitude: return FrequencyWindow::ball(1.5 * unit(d, 0), 0.5);
    case GroupKind::Diagonal:
    case GroupKind::Custom: return FrequencyWindow::box(Vec::Constant(d, 1.0), Vec::Constant(d, 2.0));
  }
  return FrequencyWindow::shearlet_box(d);
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::vector<Vec> ScanSpec::all_points(int d) const {
  if (!points.empty()) return points;
  const Vec o = origin.size() == d ? origin : Vec::Constant(d, -(size / 2) * spacing);
  std::vector<Vec> out;
  std::vector<int> idx(d, 0);
  for (;;) {
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = o[j] + idx[j] * spacing;
    out.push_back(x);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == size) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<Vec> ScanSpec::all_directions(int d) const {
  if (!direction_list.empty()) return direction_list;
  if (d != 2) throw ConfigError("scan.directions: a direction count is only supported for d = 2; list them",
                                "scan.directions");
  return planar_directions(directions);
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(fmt::format("line {}, column {}: {}", line, col, msg), "", line, col);
  }
  RunConfig cfg;
  Section top(root, "");

  {
    Section g = top.sub("group");
    const std::string kind = g.string("kind");
    cfg.group.kind = checked(g, "kind", [&] { return group_kind_from_string(kind); });
    if (cfg.group.kind == GroupKind::Custom) g.fail("kind", "custom groups cannot be configured from a file");
    cfg.group.dimension = static_cast<int>(g.integer("dimension", 2, 2));
    if (g.has("anisotropy")) {
      const Vec c = g.vector("anisotropy", cfg.group.dimension - 1);
      cfg.group.anisotropy.assign(c.data(), c.data() + c.size());
    } else if (cfg.group.kind == GroupKind::Shearlet) {
      cfg.group.anisotropy.assign(cfg.group.dimension - 1, 0.5);
    }
    checked(g, "anisotropy", [&] {
      cfg.group.validate();
      return 0;
    });
    g.finish();
  }
  const int d = cfg.group.dimension;

  cfg.window = default_window(cfg.group);
  if (top.has("wavelet")) {
    Section w = top.sub("wavelet");
    if (w.has("window")) cfg.window = parse_window(w.sub("window"), d);
    cfg.normalize = w.boolean("normalize", true);
    w.finish();
  }

  if (top.has("signal")) cfg.signal = parse_signal(top.sub("signal"), d, base_dir);

  if (top.has("detector")) {
    Section s = top.sub("detector");
    DetectorConfig& c = cfg.detector;
    c.R = s.positive("R", c.R);
    c.aperture = s.positive("aperture", c.aperture);
    c.depth = static_cast<int>(s.integer("depth", c.depth, 4));
    c.rho = s.positive("rho", c.rho);
    if (!(c.rho < 1.0)) s.fail("rho", "must lie in (0,1)");
    c.n_regular = s.number("n_regular", c.n_regular);
    c.n_singular = s.number("n_singular", c.n_singular);
    if (!(c.n_singular < c.n_regular)) s.fail("n_singular", "must be below n_regular");
    c.res_max = s.positive("res_max", c.res_max);
    c.floor_multiplier = s.positive("floor_multiplier", c.floor_multiplier);
    c.offset_spacing = s.positive("offset_spacing", c.offset_spacing);
    c.offsets_per_axis = static_cast<int>(s.integer("offsets_per_axis", c.offsets_per_axis, 1));
    c.permuted_pass = s.boolean("permuted_pass", c.permuted_pass);
    cfg.assert_regular = s.boolean("assert_regular", false);
    s.finish();
  }

  if (top.has("scan")) {
    Section s = top.sub("scan");
    ScanSpec& sc = cfg.scan;
    sc.size = static_cast<int>(s.integer("size", sc.size, 1));
    sc.spacing = s.positive("spacing", sc.spacing);
    if (s.has("origin")) sc.origin = s.vector("origin", d);
    if (s.has("points")) {
      const json& p = s.raw("points");
      if (!p.is_array() || p.empty()) s.fail("points", "expected a non-empty array of points");
      for (const json& x : p) {
        if (!x.is_array() || static_cast<int>(x.size()) != d) s.fail("points", fmt::format("expected {} coordinates", d));
        Vec v(d);
        for (int j = 0; j < d; ++j) v[j] = x[j].get<double>();
        sc.points.push_back(v);
      }
    }
    if (s.has("directions")) {
      const json& dj = s.raw("directions");
      if (dj.is_number_integer()) {
        sc.directions = dj.get<int>();
        if (sc.directions < 1) s.fail("directions", "must be at least 1");
      } else if (dj.is_array() && !dj.empty()) {
        for (const json& x : dj) {
          if (!x.is_array() || static_cast<int>(x.size()) != d)
            s.fail("directions", fmt::format("expected {} coordinates per direction", d));
          Vec v(d);
          for (int j = 0; j < d; ++j) v[j] = x[j].get<double>();
          if (!(v.norm() > 0)) s.fail("directions", "zero direction");
          sc.direction_list.push_back(v / v.norm());
        }
      } else {
        s.fail("directions", "expected a count or a list of vectors");
      }
    }
    s.finish();
  }

  if (top.has("probe")) {
    Section s = top.sub("probe");
    if (s.has("x")) cfg.probe_x = s.vector("x", d);
    if (s.has("xi")) cfg.probe_xi = s.vector("xi", d);
    s.finish();
  }

  verifier_defaults(cfg.verifier, cfg.group);
  if (top.has("verifier")) {
    Section s = top.sub("verifier");
    VerifierSpec& v = cfg.verifier;
    if (s.has("mode")) {
      const std::string m = s.string("mode");
      if (m == "strong") v.mode = ConeMode::Strong;
      else if (m == "weak") v.mode = ConeMode::Weak;
      else s.fail("mode", "expected strong or weak");
    }
    if (s.has("patch")) v.patch = parse_patch(s.sub("patch"), d);
    v.R = s.positive("R", v.R);
    if (s.has("xi")) {
      v.xi = s.vector("xi", d);
      if (!(v.xi.norm() > 0)) s.fail("xi", "must be nonzero");
      v.xi /= v.xi.norm();
    }
    if (s.has("family")) {
      const std::string f = s.string("family");
      if (f == "fixed") v.family = WindowFamily::Fixed;
      else if (f == "similitude_balls") v.family = WindowFamily::SimilitudeBalls;
      else if (f == "diagonal_sectors") v.family = WindowFamily::DiagonalSectors;
      else s.fail("family", "expected fixed, similitude_balls or diagonal_sectors");
    }
    if (s.has("w0")) v.w0 = parse_patch(s.sub("w0"), d);
    v.R0 = s.positive("R0", v.R0);
    v.use_ki = s.boolean("use_ki", v.use_ki);
    v.fit_samples = s.integer("fit_samples", v.fit_samples, 3);
    if (s.has("alpha2")) v.alpha2 = s.positive("alpha2");
    v.integral_budget = s.integer("integral_budget", v.integral_budget, 1);
    v.cone_budget = s.integer("cone_budget", v.cone_budget, 1);
    v.stay_budget = s.integer("stay_budget", v.stay_budget, 1);
    v.max_k = static_cast<int>(s.integer("max_k", v.max_k, 0));
    s.finish();
  }
  if (cfg.verifier.mode == ConeMode::Strong && cfg.verifier.family != WindowFamily::Fixed)
    throw ConfigError("verifier.family: strong mode uses the fixed window", "verifier.family");

  if (top.has("synthesize")) {
    Section s = top.sub("synthesize");
    const json& dims = s.raw("dims");
    if (!dims.is_array() || static_cast<int>(dims.size()) != d) s.fail("dims", fmt::format("expected {} sizes", d));
    for (const json& n : dims) {
      if (!n.is_number_integer() || n.get<int>() < 1) s.fail("dims", "sizes must be positive integers");
      cfg.synth.dims.push_back(n.get<int>());
    }
    cfg.synth.spacing = s.positive("spacing", cfg.synth.spacing);
    cfg.synth.origin = s.has("origin") ? s.vector("origin", d) : Vec(Vec::Zero(d));
    if (!s.has("origin"))
      for (int j = 0; j < d; ++j) cfg.synth.origin[j] = -(cfg.synth.dims[j] / 2) * cfg.synth.spacing;
    cfg.synth.name = s.string("name", cfg.synth.name);
    s.finish();
  }

  if (top.has("seed")) {
    const json& sj = top.raw("seed");
    if (!sj.is_number_unsigned()) top.fail("seed", "expected a non-negative integer");
    cfg.seed = sj.get<std::uint64_t>();
  }
  cfg.output_dir = top.string("output", cfg.output_dir);
  top.finish();

  root["seed"] = cfg.seed;
  cfg.canonical = root.dump();
  cfg.hash = fnv1a_hex(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), base.empty() ? "." : base.string());
}

void set_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  json root = json::parse(cfg.canonical);
  root["seed"] = seed;
  cfg.canonical = root.dump();
  cfg.hash = fnv1a_hex(cfg.canonical);
}

}  // namespace wf
