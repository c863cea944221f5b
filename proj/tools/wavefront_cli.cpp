// wavefront: command-line front end.
//
//   wavefront verify-group --config run.json
//   wavefront analyze      --config run.json [--force] [--permuted-pass] [--workers N]
//   wavefront probe        --config run.json --x 0,0 --xi 1,0
//   wavefront synthesize   --config run.json
//
// Exit codes: 0 ok, 1 singularities found although detector.assert_regular
// is set, 2 a structural condition failed, 64 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "wavefront/report.hpp"

namespace {

using nlohmann::json;
using namespace wf;

constexpr int kExitOk = 0;
constexpr int kExitSingular = 1;
constexpr int kExitCondition = 2;
constexpr int kExitConfig = 64;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool force = false;
  bool permuted = false;
  std::string out;
  std::string x, xi;
};

RunConfig load(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.seed) set_seed(cfg, *o.seed);
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

Vec parse_vector(const std::string& text, int d, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("--{}: '{}' is not a number", what, item), what);
    }
  }
  if (static_cast<int>(v.size()) != d) throw ConfigError(fmt::format("--{}: expected {} components", what, d), what);
  return Eigen::Map<Vec>(v.data(), d);
}

BandlimitedWavelet make_wavelet(const RunConfig& cfg, const DilationGroup& g) {
  BandlimitedWavelet psi(cfg.window);
  if (!cfg.normalize) return psi;
  AdmissibilityOptions opts;
  opts.seed = mix_seed(cfg.seed, 0xAD);
  return normalize(g, psi, opts);
}

json config_echo(const RunConfig& cfg) { return json::parse(cfg.canonical); }

// ---------------------------------------------------------------- verify-group

struct VerifyOutcome {
  json report;
  int exit_code = kExitOk;
  std::vector<std::string> failures;
};

VerifyOutcome run_verify(const RunConfig& cfg) {
  VerifyOutcome out;
  const GroupPtr g = build_group(cfg.group);
  const VerifierSpec& v = cfg.verifier;
  json& r = out.report;
  r["provenance"] = provenance(cfg);
  r["config"] = config_echo(cfg);

  const AnisotropyVerdict gate = anisotropy_gate(*g);
  r["anisotropy_gate"] = {{"strong_permitted", gate.strong_permitted}, {"message", gate.message}};

  FitOptions fo;
  fo.seed = mix_seed(cfg.seed, 1);
  const MicrolocalFit fit = fit_alpha1(*g, v.w0, cfg.window, v.R0, v.fit_samples, v.use_ki, fo);
  const EnvelopeCheck env = check_envelope(*g, fit, v.fit_samples, 1.01, mix_seed(cfg.seed, 2));
  r["fit_alpha1"] = to_json(fit);
  r["envelope_check"] = to_json(env);
  if (!(fit.alpha1 > 0 && fit.C > 0)) out.failures.push_back("norm estimate: no positive envelope exponent");
  if (env.violations > env.tested / 1000)
    out.failures.push_back(fmt::format("norm estimate: {} of {} fresh samples exceed 1.01 C", env.violations, env.tested));

  const double alpha2 = v.alpha2.value_or(2.0 * cfg.group.dimension / std::max(fit.alpha1, 1e-3));
  const NormPowerIntegral npi =
      norm_power_integral(*g, v.w0, cfg.window, v.R0, alpha2, v.integral_budget, mix_seed(cfg.seed, 3));
  r["norm_power_integral"] = to_json(npi);
  if (npi.status != IntegralStatus::Stable) out.failures.push_back("norm power integral: " + npi.note);

  ConeApproxRequest req;
  req.w = v.patch;
  req.R = v.R;
  req.xi = v.xi;
  req.v0 = cfg.window;
  req.family = v.family;
  req.budget = v.cone_budget;
  req.max_k = v.max_k;
  req.seed = mix_seed(cfg.seed, 4);
  const ConeApproxVerdict cone = check_cone_approx(*g, v.mode, req);
  r["cone_approximation"] = to_json(cone);
  if (cone.counterexample) r["cone_approximation"]["counterexample_verifies"] = verify_counterexample(*g, req, *cone.counterexample);
  if (v.mode == ConeMode::Strong && !gate.strong_permitted) {
    out.failures.push_back("strong cone approximation unavailable for groups containing positive scalar dilations; "
                           "set verifier.mode to \"weak\" (with a shrinking window family) instead");
  } else if (cone.status != ConeStatus::HoldsWitness) {
    out.failures.push_back("cone approximation: " + to_string(cone.status));
  }

  const Estimate stay = stay_measure(*g, v.xi, cfg.window, v.stay_budget, mix_seed(cfg.seed, 5));
  r["stay_measure"] = to_json(stay);

  r["failures"] = out.failures;
  r["passed"] = out.failures.empty();
  out.exit_code = out.failures.empty() ? kExitOk : kExitCondition;
  return out;
}

int cmd_verify(const Options& o) {
  const RunConfig cfg = load(o);
  VerifyOutcome res = run_verify(cfg);
  const std::string path = out_path(cfg, "verify.json");
  write_json(path, res.report);
  const json& r = res.report;
  fmt::print("group {} (d = {}): {}\n", to_string(cfg.group.kind), cfg.group.dimension,
             r["anisotropy_gate"]["message"].get<std::string>());
  fmt::print("  alpha1 = {:.4f}, C = {:.4f} over {} samples\n", r["fit_alpha1"]["alpha1"].get<double>(),
             r["fit_alpha1"]["C"].get<double>(), r["fit_alpha1"]["sample_count"].get<long>());
  fmt::print("  norm power integral: {}\n", r["norm_power_integral"]["status"].get<std::string>());
  fmt::print("  cone approximation ({}): {}\n", r["cone_approximation"]["mode"].get<std::string>(),
             r["cone_approximation"]["status"].get<std::string>());
  for (const auto& f : res.failures) fmt::print("  FAILED: {}\n", f);
  fmt::print("report: {}\n", path);
  return res.exit_code;
}

// ---------------------------------------------------------------- analyze / probe

const AnalysedObject& require_signal(const RunConfig& cfg) {
  if (!cfg.signal) throw ConfigError("signal: required for this command", "signal");
  return cfg.signal->object;
}

int cmd_analyze(const Options& o) {
  RunConfig cfg = load(o);
  const AnalysedObject& u = require_signal(cfg);
  if (!o.force) {
    VerifyOutcome v = run_verify(cfg);
    if (v.exit_code != kExitOk) {
      for (const auto& f : v.failures) fmt::print(stderr, "verify-group: {}\n", f);
      fmt::print(stderr, "refusing to analyze; pass --force to override\n");
      return v.exit_code;
    }
  }
  if (o.permuted) cfg.detector.permuted_pass = true;
  const GroupPtr g = build_group(cfg.group);
  const BandlimitedWavelet psi = make_wavelet(cfg, *g);
  const int d = cfg.group.dimension;
  const ScanResult scan =
      wavefront_scan(u, psi, *g, cfg.scan.all_points(d), cfg.scan.all_directions(d), cfg.detector, o.workers);
  for (const auto& w : scan.warnings) fmt::print(stderr, "warning: {}\n", w);

  const std::string line = provenance_line(cfg);
  write_scan_csv(out_path(cfg, "scan.csv"), scan, line);
  write_scan_matrix(out_path(cfg, "scan_matrix.txt"), scan, line);
  json summary = scan_summary(scan);
  summary["provenance"] = provenance(cfg);
  summary["config"] = config_echo(cfg);
  write_json(out_path(cfg, "scan.json"), summary);

  const auto& c = summary["counts"];
  fmt::print("{} cells: {} regular, {} singular, {} inconclusive, {} unresolvable\n", scan.verdicts.size(),
             c["Regular"].get<long>(), c["Singular"].get<long>(), c["Inconclusive"].get<long>(),
             c["Unresolvable"].get<long>());
  fmt::print("outputs in {}\n", cfg.output_dir);
  if (cfg.assert_regular && c["Singular"].get<long>() > 0) return kExitSingular;
  return kExitOk;
}

int cmd_probe(const Options& o) {
  RunConfig cfg = load(o);
  const AnalysedObject& u = require_signal(cfg);
  const int d = cfg.group.dimension;
  if (!o.x.empty()) cfg.probe_x = parse_vector(o.x, d, "x");
  if (!o.xi.empty()) cfg.probe_xi = parse_vector(o.xi, d, "xi");
  if (!cfg.probe_x || !cfg.probe_xi) throw ConfigError("probe: x and xi are required (config or --x/--xi)", "probe");
  if (!(cfg.probe_xi->norm() > 0)) throw ConfigError("probe: xi must be nonzero", "probe.xi");
  if (o.permuted) cfg.detector.permuted_pass = true;
  const GroupPtr g = build_group(cfg.group);
  const BandlimitedWavelet psi = make_wavelet(cfg, *g);
  const DecayReport rep = classify_point(u, psi, *g, *cfg.probe_x, *cfg.probe_xi, cfg.detector);
  json j = to_json(rep);
  j["provenance"] = provenance(cfg);
  std::cout << j.dump(2) << '\n';
  if (!o.out.empty()) write_report_csv(out_path(cfg, "probe.csv"), rep, provenance_line(cfg));
  return kExitOk;
}

int cmd_synthesize(const Options& o) {
  const RunConfig cfg = load(o);
  const AnalysedObject& u = require_signal(cfg);
  if (cfg.synth.dims.empty()) throw ConfigError("synthesize: section required", "synthesize");
  const GridSignal grid = synthesize_signal(u, cfg.synth.dims, cfg.synth.spacing, cfg.synth.origin);
  const std::string path = out_path(cfg, cfg.synth.name);
  write_grid(path, grid, false);
  fmt::print("wrote {} and {}.hdr\n", path, path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microlocal analysis with generalized continuous wavelet transforms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(WAVEFRONT_VERSION));
  Options o;
  auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    c->add_option("--seed", o.seed, "override the configured seed");
    c->add_option("--out", o.out, "output directory (overrides the config)");
  };
  auto* verify = app.add_subcommand("verify-group", "audit the structural conditions for the configured group");
  common(verify);
  auto* analyze = app.add_subcommand("analyze", "wavefront scan over the configured grid");
  common(analyze);
  analyze->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  analyze->add_flag("--force", o.force, "skip the verify-group gate");
  analyze->add_flag("--permuted-pass", o.permuted, "cover orbit-excluded directions with permuted coordinates");
  auto* probe = app.add_subcommand("probe", "decay report for a single (x, xi)");
  common(probe);
  probe->add_option("--x", o.x, "position, comma separated");
  probe->add_option("--xi", o.xi, "direction, comma separated");
  probe->add_flag("--permuted-pass", o.permuted, "use permuted coordinates for orbit-excluded directions");
  auto* synth = app.add_subcommand("synthesize", "sample the configured signal on a grid");
  common(synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*verify) return cmd_verify(o);
    if (*analyze) return cmd_analyze(o);
    if (*probe) return cmd_probe(o);
    if (*synth) return cmd_synthesize(o);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kExitConfig;
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitCondition;
  }
  return kExitOk;
}
