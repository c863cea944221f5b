#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/sampling.hpp"

namespace wf {

// ---------------------------------------------------------------- norm estimates

struct FitOptions {
  int octaves = 18;
  /// Fixes the exponent instead of fitting it (C is still the exact envelope).
  std::optional<double> fixed_alpha1;
  /// Hill-climbs from the worst samples so that C approximates the supremum.
  bool refine_envelope = true;
  std::uint64_t seed = 1;
};

struct MicrolocalFit {
  DirectionPatch w0;
  FrequencyWindow v;
  double R0 = 0.0;
  bool use_ki = false;
  /// Envelope exponent: slope of the per-octave maxima of log ||h^{-1}||.
  double alpha1 = 0.0;
  /// Plain least-squares slope of -log ||h^{-1}|| against log ||h||.
  double regression_slope = 0.0;
  /// max ||h^{-1}|| * ||h||^alpha1 over the samples (and refinement steps).
  double C = 0.0;
  double max_norm = 0.0;
  long sample_count = 0;
  int octaves = 0;
  double scale_max = 0.0;
};

/// Samples K_o(W0,V,R0) (filtered to K_i when use_ki) and fits
/// ||h^{-1}|| <= C ||h||^{-alpha1}. Throws NumericalError on an empty sample.
MicrolocalFit fit_alpha1(const DilationGroup& group, const DirectionPatch& w0, const FrequencyWindow& v, double R0,
                         long n_samples, bool use_ki, const FitOptions& opts = {});

struct EnvelopeCheck {
  long tested = 0;
  long violations = 0;
  double worst_ratio = 0.0;  ///< max ||h^{-1}|| ||h||^alpha1 / C
};

/// Out-of-sample test of a fit on a fresh batch from the same set and scales.
EnvelopeCheck check_envelope(const DilationGroup& group, const MicrolocalFit& fit, long n_samples, double factor,
                             std::uint64_t seed);

enum class IntegralStatus { Stable, Unstable, NotIntegrable };

std::string to_string(IntegralStatus s);

struct NormPowerIntegral {
  double alpha2 = 0.0;
  Estimate estimate;       ///< at the base budget
  Estimate check;          ///< independent run at 4x budget
  std::vector<double> octave_contributions;  ///< of the 4x run, coarsest first
  IntegralStatus status = IntegralStatus::Stable;
  std::string note;
};

/// Haar-weighted Monte Carlo of the integral of ||h||^alpha2 over K_o.
/// "Finite" means: per-octave contributions decay and the 4x-budget rerun
/// agrees within 3 combined standard errors. This is a diagnostic, not a proof.
NormPowerIntegral norm_power_integral(const DilationGroup& group, const DirectionPatch& w0, const FrequencyWindow& v,
                                      double R0, double alpha2, long budget, std::uint64_t seed, int octaves = 18);

// ---------------------------------------------------------------- cone approximation

enum class ConeMode { Strong, Weak };
enum class ConeStatus { HoldsWitness, FailsCounterexample, BudgetExhausted };

std::string to_string(ConeMode m);
std::string to_string(ConeStatus s);

/// Family V_n used by the weak property.
enum class WindowFamily {
  Fixed,             ///< V_n = V_0 for every n (strong mode)
  SimilitudeBalls,   ///< B_{1/n}(xi)
  DiagonalSectors,   ///< AnnulusSector(n/(n+1), (n+1)/n, U_{1/n})
  Custom,
};

struct ConeApproxRequest {
  DirectionPatch w;  ///< target patch W
  double R = 1.0;
  Vec xi;            ///< unit direction the witness patches are centred at
  FrequencyWindow v0;
  WindowFamily family = WindowFamily::Fixed;
  std::function<FrequencyWindow(int n)> custom_family;
  long budget = 100'000;  ///< K_o samples per candidate that passes the screens
  int max_k = 12;
  std::uint64_t seed = 1;
  int octaves = 18;
};

FrequencyWindow family_window(const ConeApproxRequest& req, int n);

struct ConeCounterexample {
  GroupElement h;
  Vec xi_prime;  ///< point of V
  Vec image;     ///< h^{-T} xi_prime, outside C(W,R)
  std::string failed_test;
  DirectionPatch w_prime;
  double R_prime = 0.0;
  int n = 0;
};

struct ConeWitness {
  DirectionPatch w_prime;
  double R_prime = 0.0;
  int n = 0;
  /// nullopt when no closed-form sufficient condition is known for the setup.
  std::optional<bool> closed_form;
};

struct ConeApproxVerdict {
  ConeMode mode = ConeMode::Weak;
  ConeStatus status = ConeStatus::BudgetExhausted;
  std::optional<ConeWitness> witness;
  std::optional<ConeCounterexample> counterexample;
  long samples_tested = 0;
  int candidates_tested = 0;
  std::vector<std::string> log;
};

/// Closed-form sufficient inequality for K_o(W',V_n,R') subset K_i(W,V_n,R),
/// when one is known for the group/family (shearlet axis bands with V_0,
/// similitude caps with balls, diagonal bands with sectors).
std::optional<bool> cone_closed_form(const DilationGroup& group, const ConeApproxRequest& req,
                                     const DirectionPatch& w_prime, double R_prime, int n);

/// Dyadic search over eps' = eps / 2^k, R' = R 2^j, n = 2^m (k, j, m <= max_k).
/// Strong mode on a group containing positive scalars replays the scalar
/// obstruction: h = alpha h_xi with alpha = (1 + R')^{-1} / 2.
ConeApproxVerdict check_cone_approx(const DilationGroup& group, ConeMode mode, const ConeApproxRequest& req);

/// True when the counterexample replays: h in K_o(W',V,R'), xi' in V and
/// h^{-T} xi' outside C(W,R).
bool verify_counterexample(const DilationGroup& group, const ConeApproxRequest& req, const ConeCounterexample& cx);

/// Cap W = B_{s/2}(xi) with s the largest spread of directions in
/// h_xi^{-T} V_0, the patch used by the scalar obstruction.
DirectionPatch obstruction_patch(const DilationGroup& group, const Vec& xi, const FrequencyWindow& v0);

// ---------------------------------------------------------------- geometric equivalence

/// An element h in K_i(W,V,R) with h^T zeta in V, searched via solve_dual
/// towards candidate points of V (so zeta lies in C_i(W,V,R;H)).
std::optional<GroupElement> c_set_contains(const DilationGroup& group, const DirectionPatch& w,
                                           const FrequencyWindow& v, double R, const Vec& zeta, Rng& rng,
                                           int tries = 64);

struct GeometricEquivalenceReport {
  long k_samples = 0;
  long k_violations = 0;
  long c_samples = 0;
  long c_violations = 0;
  /// K-counterexamples whose image point is confirmed outside C(W,R).
  long converse_confirmed = 0;
  bool consistent = true;
  std::vector<std::string> findings;
};

GeometricEquivalenceReport check_geometric_equivalence(const DilationGroup& group, const DirectionPatch& w,
                                                       const DirectionPatch& w_prime, const FrequencyWindow& v,
                                                       double R, double R_prime, long budget, std::uint64_t seed,
                                                       int octaves = 18);

// ---------------------------------------------------------------- anisotropy

struct AnisotropyVerdict {
  bool strong_permitted = false;
  std::string message;
};

AnisotropyVerdict anisotropy_gate(const DilationGroup& group);

}  // namespace wf
