#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "wavefront/wavelet.hpp"

namespace wf {

/// Samples on a regular grid x_m = origin + m * spacing, m in prod [0, dims_i).
/// Storage is row-major (last index fastest).
struct GridSignal {
  std::vector<int> dims;
  double spacing = 1.0;
  Vec origin;
  std::vector<cplx> samples;

  int dimension() const { return static_cast<int>(dims.size()); }
  std::size_t size() const;
  Vec point(std::size_t flat) const;
  std::vector<int> index_of(std::size_t flat) const;
  std::size_t flat_of(const std::vector<int>& index) const;
  void validate(bool require_power_of_two) const;
};

enum class ObjectKind { PointMass, HyperplaneDelta, Gaussian, Grid };

std::string to_string(ObjectKind kind);

/// The distribution u being analysed.
///   PointMass        delta_{x0}
///   HyperplaneDelta  surface measure of {x : <x - p, gamma> = 0}, constant 1
///   Gaussian         normalized density with mean c and covariance Sigma
///   Grid             sampled signal
struct AnalysedObject {
  ObjectKind kind = ObjectKind::PointMass;
  Vec x0;
  Vec normal;
  Vec offset;
  Vec center;
  Mat covariance;
  std::shared_ptr<const GridSignal> grid;

  static AnalysedObject point_mass(const Vec& x0);
  static AnalysedObject hyperplane(const Vec& normal, const Vec& offset);
  static AnalysedObject gaussian(const Vec& center, const Mat& covariance);
  static AnalysedObject grid_signal(std::shared_ptr<const GridSignal> grid);

  int dimension() const;
  void validate() const;
  /// The same object in coordinates x' = P^T x (P a permutation matrix).
  AnalysedObject transformed(const Mat& p) const;
  /// u-hat(xi) for Gaussian objects.
  cplx gaussian_hat(const Vec& xi) const;
};

/// W_psi u(y, h) for one fixed h, evaluated at many y. Holds per-h
/// precomputation (quadrature weights, memo of line integrals); not
/// thread-safe, one plan per worker.
class CoefficientPlan {
public:
  /// `y_radius` bounds |y - c| for the y's this plan will see (Gaussian only);
  /// larger y trigger a rebuild.
  CoefficientPlan(const AnalysedObject& u, const BandlimitedWavelet& psi, const GroupElement& h,
                  double y_radius = 1.0);
  ~CoefficientPlan();
  CoefficientPlan(CoefficientPlan&&) noexcept;
  CoefficientPlan& operator=(CoefficientPlan&&) noexcept;

  Valued operator()(const Vec& y);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Analytic path: W(y,h) = |det h|^{1/2} int u-hat(xi) conj(psi-hat(h^T xi)) e^{2 pi i <y, xi>} d xi.
Valued coefficient_analytic(const AnalysedObject& u, const BandlimitedWavelet& psi, const Vec& y,
                            const GroupElement& h);

/// W_psi u(., h) on the signal's grid.
struct CoefficientField {
  GroupElement h;
  std::vector<int> dims;
  double spacing = 1.0;
  Vec origin;
  std::vector<cplx> values;
};

/// Discrete-Fourier path. The forward transform of the signal is computed
/// once at construction and shared read-only; field() is thread-safe.
class GridTransformer {
public:
  explicit GridTransformer(std::shared_ptr<const GridSignal> signal);
  ~GridTransformer();
  GridTransformer(const GridTransformer&) = delete;
  GridTransformer& operator=(const GridTransformer&) = delete;

  const GridSignal& signal() const { return *signal_; }
  const std::vector<cplx>& spectrum() const { return spectrum_; }
  /// Frequency of DFT bin `flat` (centered indices).
  Vec frequency(std::size_t flat) const;
  /// Throws DomainError when h^{-T} supp(psi-hat) leaves the Nyquist box.
  CoefficientField field(const BandlimitedWavelet& psi, const GroupElement& h) const;

private:
  std::shared_ptr<const GridSignal> signal_;
  std::vector<cplx> spectrum_;
};

CoefficientField coefficient_grid(const GridSignal& u, const BandlimitedWavelet& psi, const GroupElement& h);

/// Samples an analytic object on a grid. Point masses occupy one cell with
/// mass 1 / cell volume; hyperplanes are rasterized as a one-cell-wide ridge of
/// height 1 / spacing (cells whose centre lies within spacing / 2 of the plane).
GridSignal synthesize_signal(const AnalysedObject& u, const std::vector<int>& dims, double spacing,
                             const Vec& origin);

/// Flat binary (64-bit little-endian reals; real/imag interleaved when
/// complex) plus a text sidecar `<path>.hdr`.
void write_grid(const std::string& path, const GridSignal& g, bool complex_values);
GridSignal read_grid(const std::string& path);
/// CSV with columns index, real, imag.
void write_field_csv(const std::string& path, const CoefficientField& f, const std::string& header_comment = "");

}  // namespace wf
