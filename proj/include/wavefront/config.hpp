#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/detector.hpp"
#include "wavefront/verifier.hpp"

namespace wf {

/// Rejected configuration. `field` is a dotted path ("wavelet.window.radius");
/// line/column are set for syntax errors (1-based, 0 when unknown).
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0, int column = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

private:
  std::string field_;
  int line_ = 0;
  int column_ = 0;
};

struct SignalSpec {
  AnalysedObject object;
  std::string grid_path;  ///< set for grid signals
};

struct ScanSpec {
  int size = 64;                 ///< points per axis
  double spacing = 2.0 / 64.0;
  Vec origin;                    ///< default: centred grid, x_i = (i - size/2) spacing
  int directions = 32;           ///< planar directions 2 pi j / n (d = 2)
  std::vector<Vec> points;       ///< explicit points override the grid
  std::vector<Vec> direction_list;

  std::vector<Vec> all_points(int d) const;
  std::vector<Vec> all_directions(int d) const;
};

struct VerifierSpec {
  ConeMode mode = ConeMode::Strong;
  DirectionPatch patch;  ///< W of the cone-approximation check
  double R = 10.0;
  Vec xi;
  WindowFamily family = WindowFamily::Fixed;
  DirectionPatch w0;     ///< W_0 of the norm estimates
  double R0 = 5.0;
  bool use_ki = true;
  long fit_samples = 10'000;
  std::optional<double> alpha2;  ///< default 2 d / alpha1
  long integral_budget = 20'000;
  long cone_budget = 100'000;
  long stay_budget = 100'000;
  int max_k = 12;
};

struct SynthSpec {
  std::vector<int> dims;
  double spacing = 2.0 / 64.0;
  Vec origin;
  std::string name = "signal.bin";
};

struct RunConfig {
  DilationGroupSpec group;
  FrequencyWindow window;
  bool normalize = true;
  std::optional<SignalSpec> signal;
  DetectorConfig detector;
  bool assert_regular = false;  ///< analyze exits 1 if any cell is Singular
  ScanSpec scan;
  std::optional<Vec> probe_x, probe_xi;
  VerifierSpec verifier;
  SynthSpec synth;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  /// Canonical JSON of the parsed input (keys sorted), and its FNV-1a hash.
  std::string canonical;
  std::string hash;
};

/// Parses the JSON schema documented in docs/config.md. Grid signal paths are
/// resolved relative to `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Seed override (re-hashes so outputs record the effective seed).
void set_seed(RunConfig& cfg, std::uint64_t seed);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace wf
