#pragma once

#include <string>
#include <vector>

#include "wavefront/transform.hpp"

namespace wf {

struct DetectorConfig {
  double R = 2.0;            ///< cone cutoff
  double aperture = 0.1;     ///< radius of the cap W around xi
  int depth = 16;            ///< ladder length
  double rho = 0.5;          ///< ladder ratio ||h_{k+1}|| / ||h_k||
  double n_regular = 4.0;
  double n_singular = 1.0;
  double res_max = 0.5;
  double floor_multiplier = 1e3;
  double offset_spacing = 0.05;  ///< neighbourhood U: offsets_per_axis^d points
  int offsets_per_axis = 5;
  bool permuted_pass = false;
};

enum class Tier { Ki, Ko };

struct ProbeLadder {
  Vec direction;
  FrequencyWindow window;
  DirectionPatch patch;
  double R = 0.0;
  double rho = 0.5;
  std::vector<GroupElement> elements;
  std::vector<Tier> tiers;
  std::vector<Vec> y_offsets;
  std::vector<std::string> warnings;
};

/// offsets_per_axis^d points spaced `spacing` apart, centred at 0.
std::vector<Vec> neighborhood_offsets(int d, double spacing, int per_axis = 5);

/// Canonical single-parameter ladder: norms rho^k starting from the first
/// K_o element at or below norm 1; elements outside K_o are dropped.
ProbeLadder build_probe_ladder(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v,
                               const DirectionPatch& w, double R, double rho, int depth, std::vector<Vec> y_offsets);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max absolute deviation from the line
  int used = 0;
};

/// Least-squares slope of (log ||h||, log |W|). Throws InvalidArgument with
/// fewer than 3 samples.
SlopeFit decay_exponent(const std::vector<std::pair<double, double>>& samples);

enum class Classification { Regular, Singular, Inconclusive, Unresolvable };

std::string to_string(Classification c);

struct DecaySample {
  double norm = 0.0;     ///< ||h||
  double coeff = 0.0;    ///< max over y in x + U of |W(y,h)|
  double error = 0.0;    ///< matching quadrature error estimate
  double floor = 0.0;
  bool below_floor = false;
  Tier tier = Tier::Ko;
};

struct DecayReport {
  Vec x;
  Vec xi;
  std::vector<DecaySample> samples;
  double slope = 0.0;
  double residual = 0.0;
  bool fitted = false;
  bool floor_hit = false;
  bool permuted = false;
  Classification verdict = Classification::Inconclusive;
  std::string note;
};

/// Coefficient plans for every ladder element (reused across points).
/// Grid signals go through the FFT path instead: one coefficient field per
/// element, read at the nearest lattice point (periodically), and elements
/// whose frequency support would alias are dropped with a warning.
class LadderEvaluator {
public:
  LadderEvaluator(const AnalysedObject& u, const BandlimitedWavelet& psi, ProbeLadder ladder, double y_radius);
  const ProbeLadder& ladder() const { return ladder_; }
  /// Decay samples at x (max over x + U per element).
  std::vector<DecaySample> samples_at(const Vec& x, const DetectorConfig& cfg);

private:
  ProbeLadder ladder_;
  std::vector<CoefficientPlan> plans_;
  std::vector<CoefficientField> fields_;
  std::vector<double> field_error_;

  Valued field_at(std::size_t k, const Vec& y) const;
};

/// Verdict from decay samples, per the thresholds in cfg.
void classify_samples(DecayReport& report, const DetectorConfig& cfg);

/// Directions with xi_1 = 0 etc. lie outside the shearlet/diagonal orbit.
/// With cfg.permuted_pass a cyclic coordinate permutation moves them into it;
/// the report then carries permuted = true.
DecayReport classify_point(const AnalysedObject& u, const BandlimitedWavelet& psi, const DilationGroup& group,
                           const Vec& x, const Vec& xi, const DetectorConfig& cfg);

struct ScanResult {
  std::vector<Vec> points;
  std::vector<Vec> directions;
  /// verdicts[p * directions.size() + q]
  std::vector<Classification> verdicts;
  std::vector<double> slopes;
  std::vector<bool> permuted;
  std::vector<std::string> warnings;

  Classification at(std::size_t p, std::size_t q) const { return verdicts[p * directions.size() + q]; }
};

/// Unit directions theta_j = 2 pi j / n in the plane; components below 1e-12
/// are snapped to 0.
std::vector<Vec> planar_directions(int n);

ScanResult wavefront_scan(const AnalysedObject& u, const BandlimitedWavelet& psi, const DilationGroup& group,
                          const std::vector<Vec>& points, const std::vector<Vec>& directions,
                          const DetectorConfig& cfg, unsigned workers = 1);

void write_report_csv(const std::string& path, const DecayReport& r, const std::string& header_comment = "");
void write_scan_csv(const std::string& path, const ScanResult& s, const std::string& header_comment = "");
/// Matrix of verdict codes (rows: points, columns: directions):
/// 1 regular, -1 singular, 0 inconclusive, 2 unresolvable.
void write_scan_matrix(const std::string& path, const ScanResult& s, const std::string& header_comment = "");
int verdict_code(Classification c);

}  // namespace wf
