#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/common.hpp"

namespace wf {

enum class GroupKind { Similitude, Diagonal, Shearlet, Custom };

std::string to_string(GroupKind kind);
GroupKind group_kind_from_string(const std::string& name);

/// User-supplied chart for a dilation group that is not one of the built-ins.
/// The library never derives the Haar density of a custom group; it only
/// checks it against the left-invariance oracle in tests.
struct CustomChart {
  int param_dim = 0;
  std::function<Mat(const Vec&)> matrix;
  std::function<double(const Vec&)> haar_density;
  std::function<bool(const Vec&)> in_domain;
  /// Inverse chart; required for compose()/inverse().
  std::function<Vec(const Mat&)> chart_of;
  std::function<bool(const Vec&)> orbit_predicate;
  Vec base_point;
  bool contains_scalars = false;
  /// Chart box hints used by samplers. Empty means "no bound hints".
  Vec box_lo;
  Vec box_hi;
};

struct DilationGroupSpec {
  GroupKind kind = GroupKind::Similitude;
  int dimension = 2;
  /// Shearlet exponents (c_2, ..., c_d); empty for the other kinds.
  std::vector<double> anisotropy;
  std::shared_ptr<const CustomChart> custom;

  /// Throws InvalidArgument if the spec violates its invariants.
  void validate() const;
  /// True when every shearlet exponent lies in (0,1).
  bool anisotropy_in_unit_interval() const;
};

/// A dilation h in H. Chart coordinates are canonical; the matrices are caches.
///
/// Chart layouts:
///   similitude  (a, theta_11, ..., theta_dd)   a > 0, theta in SO(d) row-major
///   diagonal    (a_1, ..., a_d)                all a_i != 0
///   shearlet    (sign, a, b_2, ..., b_d)       sign = +-1, a > 0
struct GroupElement {
  Vec params;
  Mat matrix;
  Mat inv_matrix;
  Mat inv_transpose;
  double op_norm = 1.0;
  double det = 1.0;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

struct OrbitDescriptor {
  GroupKind kind = GroupKind::Similitude;
  std::string predicate;
  Vec base_point;
};

/// Spectral norm of a square matrix.
double operator_norm(const Mat& m);

class DilationGroup {
public:
  explicit DilationGroup(DilationGroupSpec spec) : spec_(std::move(spec)) {}
  virtual ~DilationGroup() = default;

  const DilationGroupSpec& spec() const { return spec_; }
  GroupKind kind() const { return spec_.kind; }
  int dimension() const { return spec_.dimension; }

  virtual int param_dim() const = 0;
  virtual OrbitDescriptor orbit() const = 0;
  virtual bool params_in_domain(const Vec& params) const = 0;

  /// matrix_of: builds the element with every cached field populated.
  virtual GroupElement element(const Vec& params) const = 0;
  GroupElement identity() const;

  virtual GroupElement compose(const GroupElement& g, const GroupElement& h) const;
  virtual GroupElement inverse(const GroupElement& h) const;

  /// Density of the left Haar measure w.r.t. Lebesgue measure in the chart.
  /// For the similitude group the rotation factor is measured with the
  /// normalized Haar measure of SO(d) (total mass 1).
  virtual double left_haar_density(const Vec& params) const = 0;

  virtual bool contains_positive_scalar_dilations() const = 0;
  /// alpha * id as a group element, if it belongs to H.
  virtual std::optional<GroupElement> scalar_dilation(double alpha) const;

  /// The scale coordinate that canonical_element/random_element refer to.
  virtual double scale_of(const GroupElement& h) const = 0;

  virtual bool in_open_orbit(const Vec& xi) const = 0;

  /// Some h with h^T from = to. Throws DomainError when no such h exists.
  /// Groups with nontrivial stabilizers pick the stabilizer part from rng.
  virtual GroupElement solve_dual(const Vec& from, const Vec& to, Rng& rng) const = 0;

  /// Canonical element at scale s (s -> 0 means fine scales) whose inverse
  /// transpose maps the orbit base point to a positive multiple of `direction`.
  virtual GroupElement canonical_element(const Vec& direction, double scale) const = 0;

  /// A random element with scale parameter in [scale_lo, scale_hi]
  /// (log-uniform) and bounded remaining chart coordinates.
  virtual GroupElement random_element(Rng& rng, double scale_lo, double scale_hi) const = 0;

protected:
  GroupElement finish(Vec params, Mat m, Mat inv) const;
  void check_same_dimension(const GroupElement& h) const;

private:
  DilationGroupSpec spec_;
};

using GroupPtr = std::shared_ptr<const DilationGroup>;

/// Builds one of the built-in groups (or a custom one) from its spec.
GroupPtr build_group(const DilationGroupSpec& spec);

/// h^{-T}; for the built-ins this is the cached closed form.
inline const Mat& inverse_transpose(const GroupElement& h) { return h.inv_transpose; }

// Chart helpers for the built-ins.
Vec similitude_params(double a, const Mat& rotation);
Vec similitude_params_2d(double a, double angle);
Vec shearlet_params(int sign, double a, const std::vector<double>& shear);
Vec diagonal_params(const std::vector<double>& entries);

/// Haar-distributed element of SO(d): QR of a Gaussian matrix, signs fixed.
Mat random_rotation(Rng& rng, int d);
/// Rotation acting in span(from, to) that maps unit `from` onto unit `to`.
Mat rotation_taking(const Vec& from, const Vec& to);
/// Random rotation fixing the unit vector `axis`.
Mat random_rotation_fixing(Rng& rng, const Vec& axis);

/// Shearlet matrix h(a, b) (positive component) for exponents c.
Mat shearlet_matrix(double a, const Vec& b, const std::vector<double>& c);
/// Closed form of h(a,b)^{-T}.
Mat shearlet_inverse_transpose(double a, const Vec& b, const std::vector<double>& c);

}  // namespace wf
