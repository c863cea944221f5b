#include "wavefront/group.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace wf {

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Similitude: return "similitude";
    case GroupKind::Diagonal: return "diagonal";
    case GroupKind::Shearlet: return "shearlet";
    case GroupKind::Custom: return "custom";
  }
  return "unknown";
}

GroupKind group_kind_from_string(const std::string& name) {
  if (name == "similitude") return GroupKind::Similitude;
  if (name == "diagonal") return GroupKind::Diagonal;
  if (name == "shearlet") return GroupKind::Shearlet;
  if (name == "custom") return GroupKind::Custom;
  throw InvalidArgument(fmt::format("unknown group kind '{}'", name));
}

void DilationGroupSpec::validate() const {
  if (dimension < 2) throw InvalidArgument(fmt::format("group dimension must be >= 2, got {}", dimension));
  if (kind == GroupKind::Shearlet) {
    if (static_cast<int>(anisotropy.size()) != dimension - 1)
      throw InvalidArgument(fmt::format("shearlet anisotropy needs {} entries, got {}", dimension - 1,
                                        anisotropy.size()));
    for (double c : anisotropy) {
      if (!std::isfinite(c)) throw InvalidArgument("shearlet anisotropy must be finite");
    }
  } else if (!anisotropy.empty()) {
    throw InvalidArgument("anisotropy is only meaningful for the shearlet group");
  }
  if (kind == GroupKind::Custom) {
    if (!custom) throw InvalidArgument("custom group needs a chart");
    if (custom->param_dim <= 0 || !custom->matrix || !custom->haar_density || !custom->orbit_predicate)
      throw InvalidArgument("custom chart is incomplete");
    if (custom->base_point.size() != dimension) throw InvalidArgument("custom base point has wrong dimension");
  }
}

bool DilationGroupSpec::anisotropy_in_unit_interval() const {
  if (kind != GroupKind::Shearlet) return false;
  return std::all_of(anisotropy.begin(), anisotropy.end(), [](double c) { return c > 0.0 && c < 1.0; });
}

double operator_norm(const Mat& m) {
  if (m.rows() == 2 && m.cols() == 2) {
    const double f = m.squaredNorm();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
    return std::sqrt(0.5 * (f + disc));
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()[0];
}

GroupElement DilationGroup::finish(Vec params, Mat m, Mat inv) const {
  GroupElement e;
  e.params = std::move(params);
  e.op_norm = operator_norm(m);
  e.det = m.determinant();
  e.inv_transpose = inv.transpose();
  e.matrix = std::move(m);
  e.inv_matrix = std::move(inv);
  return e;
}

void DilationGroup::check_same_dimension(const GroupElement& h) const {
  if (h.dimension() != dimension() || h.params.size() != param_dim())
    throw InvalidArgument("group element does not belong to this group");
}

GroupElement DilationGroup::identity() const {
  const int d = dimension();
  switch (kind()) {
    case GroupKind::Similitude: return element(similitude_params(1.0, Mat::Identity(d, d)));
    case GroupKind::Diagonal: return element(Vec::Ones(d));
    case GroupKind::Shearlet: return element(shearlet_params(1, 1.0, std::vector<double>(d - 1, 0.0)));
    case GroupKind::Custom: return element(spec().custom->chart_of(Mat::Identity(d, d)));
  }
  throw InvalidArgument("unknown group kind");
}

GroupElement DilationGroup::compose(const GroupElement& g, const GroupElement& h) const {
  check_same_dimension(g);
  check_same_dimension(h);
  if (!spec().custom || !spec().custom->chart_of) throw InvalidArgument("custom chart lacks chart_of");
  return element(spec().custom->chart_of(g.matrix * h.matrix));
}

GroupElement DilationGroup::inverse(const GroupElement& h) const {
  check_same_dimension(h);
  if (!spec().custom || !spec().custom->chart_of) throw InvalidArgument("custom chart lacks chart_of");
  return element(spec().custom->chart_of(h.inv_matrix));
}

std::optional<GroupElement> DilationGroup::scalar_dilation(double) const { return std::nullopt; }

Vec similitude_params(double a, const Mat& rotation) {
  const int d = static_cast<int>(rotation.rows());
  Vec p(1 + d * d);
  p[0] = a;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p[1 + i * d + j] = rotation(i, j);
  return p;
}

Vec similitude_params_2d(double a, double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return similitude_params(a, r);
}

Vec shearlet_params(int sign, double a, const std::vector<double>& shear) {
  Vec p(2 + shear.size());
  p[0] = sign >= 0 ? 1.0 : -1.0;
  p[1] = a;
  for (std::size_t i = 0; i < shear.size(); ++i) p[2 + i] = shear[i];
  return p;
}

Vec diagonal_params(const std::vector<double>& entries) {
  return Eigen::Map<const Vec>(entries.data(), static_cast<Eigen::Index>(entries.size()));
}

Mat shearlet_matrix(double a, const Vec& b, const std::vector<double>& c) {
  const int d = static_cast<int>(c.size()) + 1;
  Mat m = Mat::Zero(d, d);
  m(0, 0) = a;
  for (int i = 1; i < d; ++i) {
    m(0, i) = b[i - 1];
    m(i, i) = std::pow(a, c[i - 1]);
  }
  return m;
}

Mat shearlet_inverse_transpose(double a, const Vec& b, const std::vector<double>& c) {
  const int d = static_cast<int>(c.size()) + 1;
  Mat m = Mat::Zero(d, d);
  m(0, 0) = 1.0 / a;
  for (int i = 1; i < d; ++i) {
    m(i, 0) = -std::pow(a, -1.0 - c[i - 1]) * b[i - 1];
    m(i, i) = std::pow(a, -c[i - 1]);
  }
  return m;
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("scale range must satisfy 0 < lo <= hi");
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

Mat rotation_block(const Vec& params, int d) {
  Mat r(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = params[1 + i * d + j];
  return r;
}

class SimilitudeGroup final : public DilationGroup {
public:
  using DilationGroup::DilationGroup;

  int param_dim() const override { return 1 + dimension() * dimension(); }

  OrbitDescriptor orbit() const override {
    return {GroupKind::Similitude, "xi != 0", Vec::Unit(dimension(), 0)};
  }

  bool params_in_domain(const Vec& p) const override {
    if (p.size() != param_dim() || !(p[0] > 0.0)) return false;
    Mat r = rotation_block(p, dimension());
    return (r.transpose() * r - Mat::Identity(dimension(), dimension())).norm() < 1e-10 && r.determinant() > 0;
  }

  GroupElement element(const Vec& p) const override {
    const int d = dimension();
    if (p.size() != param_dim()) throw InvalidArgument("similitude chart needs 1 + d*d coordinates");
    if (!(p[0] > 0.0)) throw InvalidArgument(fmt::format("similitude scale must be positive, got {}", p[0]));
    Mat r = rotation_block(p, d);
    if ((r.transpose() * r - Mat::Identity(d, d)).norm() >= 1e-10 || r.determinant() <= 0)
      throw InvalidArgument("similitude rotation block is not in SO(d)");
    const double a = p[0];
    GroupElement e;
    e.params = p;
    e.matrix = a * r;
    e.inv_matrix = r.transpose() / a;
    e.inv_transpose = e.inv_matrix.transpose();
    e.op_norm = a;
    e.det = std::pow(a, d);
    return e;
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    check_same_dimension(g);
    check_same_dimension(h);
    const int d = dimension();
    Mat r = rotation_block(g.params, d) * rotation_block(h.params, d);
    return element(similitude_params(g.params[0] * h.params[0], reorthonormalize(r)));
  }

  GroupElement inverse(const GroupElement& h) const override {
    check_same_dimension(h);
    Mat r = rotation_block(h.params, dimension()).transpose();
    return element(similitude_params(1.0 / h.params[0], r));
  }

  double left_haar_density(const Vec& p) const override { return 1.0 / p[0]; }
  bool contains_positive_scalar_dilations() const override { return true; }

  std::optional<GroupElement> scalar_dilation(double alpha) const override {
    if (!(alpha > 0.0)) return std::nullopt;
    return element(similitude_params(alpha, Mat::Identity(dimension(), dimension())));
  }

  double scale_of(const GroupElement& h) const override { return h.params[0]; }

  bool in_open_orbit(const Vec& xi) const override {
    return xi.size() == dimension() && xi.norm() > 0.0;
  }

  GroupElement solve_dual(const Vec& from, const Vec& to, Rng& rng) const override {
    if (!in_open_orbit(from) || !in_open_orbit(to)) throw DomainError("similitude solve_dual: zero vector");
    const double a = to.norm() / from.norm();
    Vec f = from / from.norm();
    // theta^T f = t-hat; theta^T = T * S with S a random rotation fixing f.
    Mat thetaT = rotation_taking(f, to) * random_rotation_fixing(rng, f);
    return element(similitude_params(a, reorthonormalize(thetaT.transpose())));
  }

  GroupElement canonical_element(const Vec& direction, double scale) const override {
    if (!in_open_orbit(direction)) throw DomainError("direction outside the open orbit");
    Mat r = rotation_taking(Vec::Unit(dimension(), 0), direction);
    return element(similitude_params(scale, reorthonormalize(r)));
  }

  GroupElement random_element(Rng& rng, double lo, double hi) const override {
    const double a = log_uniform(rng, lo, hi);
    return element(similitude_params(a, random_rotation(rng, dimension())));
  }

private:
  static Mat reorthonormalize(const Mat& r) {
    // Products of many rotations drift; project back onto SO(d).
    Eigen::JacobiSVD<Mat> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat q = svd.matrixU() * svd.matrixV().transpose();
    return q;
  }
};

class DiagonalGroup final : public DilationGroup {
public:
  using DilationGroup::DilationGroup;

  int param_dim() const override { return dimension(); }

  OrbitDescriptor orbit() const override {
    return {GroupKind::Diagonal, "all xi_i != 0",
            Vec::Constant(dimension(), 1.0 / std::sqrt(static_cast<double>(dimension())))};
  }

  bool params_in_domain(const Vec& p) const override {
    return p.size() == dimension() && (p.array() != 0.0).all() && p.allFinite();
  }

  GroupElement element(const Vec& p) const override {
    if (!params_in_domain(p)) throw InvalidArgument("diagonal entries must be finite and nonzero");
    GroupElement e;
    e.params = p;
    e.matrix = p.asDiagonal();
    Vec inv = p.cwiseInverse();
    e.inv_matrix = inv.asDiagonal();
    e.inv_transpose = e.inv_matrix.transpose();
    e.op_norm = p.cwiseAbs().maxCoeff();
    e.det = p.prod();
    return e;
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    check_same_dimension(g);
    check_same_dimension(h);
    return element(g.params.cwiseProduct(h.params));
  }

  GroupElement inverse(const GroupElement& h) const override {
    check_same_dimension(h);
    return element(h.params.cwiseInverse());
  }

  double left_haar_density(const Vec& p) const override { return 1.0 / p.cwiseAbs().prod(); }
  bool contains_positive_scalar_dilations() const override { return true; }

  std::optional<GroupElement> scalar_dilation(double alpha) const override {
    if (!(alpha > 0.0)) return std::nullopt;
    return element(Vec::Constant(dimension(), alpha));
  }

  // Geometric mean of |a_i|.
  double scale_of(const GroupElement& h) const override {
    return std::exp(h.params.cwiseAbs().array().log().mean());
  }

  bool in_open_orbit(const Vec& xi) const override {
    return xi.size() == dimension() && (xi.array() != 0.0).all();
  }

  GroupElement solve_dual(const Vec& from, const Vec& to, Rng&) const override {
    if (!in_open_orbit(from) || !in_open_orbit(to)) throw DomainError("diagonal solve_dual: point outside (R*)^d");
    return element(to.cwiseQuotient(from));
  }

  GroupElement canonical_element(const Vec& direction, double scale) const override {
    if (!in_open_orbit(direction)) throw DomainError("direction outside the open orbit");
    Vec u = direction / direction.norm();
    // h^{-T} base = (1 / (sqrt(d) a_i))_i  parallel to u.
    Vec a = (std::sqrt(static_cast<double>(dimension())) * u).cwiseInverse();
    const double g = std::exp(a.cwiseAbs().array().log().mean());
    return element(a * (scale / g));
  }

  GroupElement random_element(Rng& rng, double lo, double hi) const override {
    Vec a(dimension());
    for (int i = 0; i < dimension(); ++i) {
      a[i] = log_uniform(rng, lo, hi) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
    }
    return element(a);
  }
};

class ShearletGroup final : public DilationGroup {
public:
  using DilationGroup::DilationGroup;

  int param_dim() const override { return dimension() + 1; }

  OrbitDescriptor orbit() const override {
    return {GroupKind::Shearlet, "xi_1 != 0", Vec::Unit(dimension(), 0)};
  }

  bool params_in_domain(const Vec& p) const override {
    return p.size() == param_dim() && (p[0] == 1.0 || p[0] == -1.0) && p[1] > 0.0 && p.allFinite();
  }

  GroupElement element(const Vec& p) const override {
    if (p.size() != param_dim()) throw InvalidArgument("shearlet chart needs (sign, a, b_2..b_d)");
    if (p[0] != 1.0 && p[0] != -1.0) throw InvalidArgument("shearlet sign must be +1 or -1");
    if (!(p[1] > 0.0)) throw InvalidArgument(fmt::format("shearlet scale must be positive, got {}", p[1]));
    const auto& c = spec().anisotropy;
    const double s = p[0], a = p[1];
    Vec b = p.tail(dimension() - 1);
    GroupElement e;
    e.params = p;
    e.matrix = s * shearlet_matrix(a, b, c);
    e.inv_matrix = s * shearlet_inverse_transpose(a, b, c).transpose();
    e.inv_transpose = e.inv_matrix.transpose();
    e.op_norm = operator_norm(e.matrix);
    double csum = 0.0;
    for (double ci : c) csum += ci;
    e.det = ((dimension() % 2 == 1 && s < 0) ? -1.0 : 1.0) * std::pow(a, 1.0 + csum);
    return e;
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const override {
    check_same_dimension(g);
    check_same_dimension(h);
    const auto& c = spec().anisotropy;
    const double a = g.params[1], a2 = h.params[1];
    Vec p(param_dim());
    p[0] = g.params[0] * h.params[0];
    p[1] = a * a2;
    for (int i = 0; i + 1 < dimension(); ++i) {
      p[2 + i] = a * h.params[2 + i] + g.params[2 + i] * std::pow(a2, c[i]);
    }
    return element(p);
  }

  GroupElement inverse(const GroupElement& h) const override {
    check_same_dimension(h);
    const auto& c = spec().anisotropy;
    const double a = h.params[1];
    Vec p(param_dim());
    p[0] = h.params[0];
    p[1] = 1.0 / a;
    for (int i = 0; i + 1 < dimension(); ++i) p[2 + i] = -std::pow(a, -1.0 - c[i]) * h.params[2 + i];
    return element(p);
  }

  double left_haar_density(const Vec& p) const override { return std::pow(p[1], -dimension()); }

  bool contains_positive_scalar_dilations() const override {
    // alpha * id = h(alpha, 0) requires alpha^{c_i} = alpha, i.e. every c_i = 1.
    const auto& c = spec().anisotropy;
    return std::all_of(c.begin(), c.end(), [](double ci) { return ci == 1.0; });
  }

  std::optional<GroupElement> scalar_dilation(double alpha) const override {
    if (!(alpha > 0.0)) return std::nullopt;
    if (alpha != 1.0 && !contains_positive_scalar_dilations()) return std::nullopt;
    return element(shearlet_params(1, alpha, std::vector<double>(dimension() - 1, 0.0)));
  }

  double scale_of(const GroupElement& h) const override { return h.params[1]; }

  bool in_open_orbit(const Vec& xi) const override { return xi.size() == dimension() && xi[0] != 0.0; }

  GroupElement solve_dual(const Vec& from, const Vec& to, Rng&) const override {
    if (!in_open_orbit(from) || !in_open_orbit(to)) throw DomainError("shearlet solve_dual: xi_1 = 0");
    const auto& c = spec().anisotropy;
    const double q = to[0] / from[0];
    const double s = q > 0 ? 1.0 : -1.0;
    const double a = std::abs(q);
    Vec p(param_dim());
    p[0] = s;
    p[1] = a;
    for (int i = 1; i < dimension(); ++i) {
      p[1 + i] = (s * to[i] - std::pow(a, c[i - 1]) * from[i]) / from[0];
    }
    return element(p);
  }

  GroupElement canonical_element(const Vec& direction, double scale) const override {
    if (!in_open_orbit(direction)) throw DomainError("direction outside the open orbit (xi_1 = 0)");
    const auto& c = spec().anisotropy;
    Vec p(param_dim());
    p[0] = direction[0] > 0 ? 1.0 : -1.0;
    p[1] = scale;
    for (int i = 1; i < dimension(); ++i) p[1 + i] = -std::pow(scale, c[i - 1]) * direction[i] / direction[0];
    return element(p);
  }

  GroupElement random_element(Rng& rng, double lo, double hi) const override {
    Vec p(param_dim());
    p[0] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    p[1] = log_uniform(rng, lo, hi);
    for (int i = 2; i < param_dim(); ++i) p[i] = uniform(rng, -2.0, 2.0);
    return element(p);
  }
};

class CustomGroup final : public DilationGroup {
public:
  using DilationGroup::DilationGroup;

  int param_dim() const override { return chart().param_dim; }

  OrbitDescriptor orbit() const override { return {GroupKind::Custom, "custom predicate", chart().base_point}; }

  bool params_in_domain(const Vec& p) const override {
    if (p.size() != param_dim()) return false;
    return !chart().in_domain || chart().in_domain(p);
  }

  GroupElement element(const Vec& p) const override {
    if (!params_in_domain(p)) throw InvalidArgument("parameters outside the custom chart domain");
    Mat m = chart().matrix(p);
    if (m.rows() != dimension() || m.cols() != dimension()) throw InvalidArgument("custom matrix has wrong shape");
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) throw InvalidArgument("custom chart produced a singular matrix");
    return finish(p, m, lu.inverse());
  }

  double left_haar_density(const Vec& p) const override { return chart().haar_density(p); }
  bool contains_positive_scalar_dilations() const override { return chart().contains_scalars; }

  double scale_of(const GroupElement& h) const override { return h.op_norm; }

  bool in_open_orbit(const Vec& xi) const override {
    return xi.size() == dimension() && chart().orbit_predicate(xi);
  }

  GroupElement solve_dual(const Vec&, const Vec&, Rng&) const override {
    throw InvalidArgument("solve_dual is not available for custom groups");
  }

  GroupElement canonical_element(const Vec&, double) const override {
    throw InvalidArgument("canonical ladders are not available for custom groups");
  }

  GroupElement random_element(Rng& rng, double, double) const override {
    const auto& c = chart();
    if (c.box_lo.size() != param_dim() || c.box_hi.size() != param_dim())
      throw InvalidArgument("custom chart has no bound hints");
    for (int attempt = 0; attempt < 10000; ++attempt) {
      Vec p(param_dim());
      for (int i = 0; i < param_dim(); ++i) p[i] = uniform(rng, c.box_lo[i], c.box_hi[i]);
      if (params_in_domain(p)) return element(p);
    }
    throw NumericalError("could not draw a point inside the custom chart domain");
  }

private:
  const CustomChart& chart() const { return *spec().custom; }
};

}  // namespace

GroupPtr build_group(const DilationGroupSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case GroupKind::Similitude: return std::make_shared<SimilitudeGroup>(spec);
    case GroupKind::Diagonal: return std::make_shared<DiagonalGroup>(spec);
    case GroupKind::Shearlet: return std::make_shared<ShearletGroup>(spec);
    case GroupKind::Custom: return std::make_shared<CustomGroup>(spec);
  }
  throw InvalidArgument("unknown group kind");
}

}  // namespace wf
