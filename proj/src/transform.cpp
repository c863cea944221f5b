#include "wavefront/transform.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace wf {

std::string to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::PointMass: return "point_mass";
    case ObjectKind::HyperplaneDelta: return "hyperplane";
    case ObjectKind::Gaussian: return "gaussian";
    case ObjectKind::Grid: return "grid";
  }
  return "unknown";
}

AnalysedObject AnalysedObject::point_mass(const Vec& x0) {
  AnalysedObject u;
  u.kind = ObjectKind::PointMass;
  u.x0 = x0;
  u.validate();
  return u;
}

AnalysedObject AnalysedObject::hyperplane(const Vec& normal, const Vec& offset) {
  AnalysedObject u;
  u.kind = ObjectKind::HyperplaneDelta;
  const double n = normal.norm();
  if (!(n > 0.0)) throw InvalidArgument("hyperplane normal must be nonzero");
  u.normal = normal / n;
  u.offset = offset;
  u.validate();
  return u;
}

AnalysedObject AnalysedObject::gaussian(const Vec& center, const Mat& covariance) {
  AnalysedObject u;
  u.kind = ObjectKind::Gaussian;
  u.center = center;
  u.covariance = covariance;
  u.validate();
  return u;
}

AnalysedObject AnalysedObject::grid_signal(std::shared_ptr<const GridSignal> grid) {
  AnalysedObject u;
  u.kind = ObjectKind::Grid;
  u.grid = std::move(grid);
  u.validate();
  return u;
}

int AnalysedObject::dimension() const {
  switch (kind) {
    case ObjectKind::PointMass: return static_cast<int>(x0.size());
    case ObjectKind::HyperplaneDelta: return static_cast<int>(normal.size());
    case ObjectKind::Gaussian: return static_cast<int>(center.size());
    case ObjectKind::Grid: return grid ? grid->dimension() : 0;
  }
  return 0;
}

void AnalysedObject::validate() const {
  const int d = dimension();
  if (d < 1) throw InvalidArgument("analysed object has no dimension");
  switch (kind) {
    case ObjectKind::PointMass: break;
    case ObjectKind::HyperplaneDelta:
      if (offset.size() != d) throw InvalidArgument("hyperplane offset has wrong dimension");
      if (std::abs(normal.norm() - 1.0) > 1e-12) throw InvalidArgument("hyperplane normal must be unit length");
      break;
    case ObjectKind::Gaussian: {
      if (covariance.rows() != d || covariance.cols() != d) throw InvalidArgument("covariance has wrong shape");
      if ((covariance - covariance.transpose()).norm() > 1e-12 * covariance.norm())
        throw InvalidArgument("covariance must be symmetric");
      Eigen::LLT<Mat> llt(covariance);
      if (llt.info() != Eigen::Success) throw InvalidArgument("covariance must be positive definite");
      break;
    }
    case ObjectKind::Grid:
      if (!grid) throw InvalidArgument("grid object without samples");
      grid->validate(false);
      break;
  }
}

AnalysedObject AnalysedObject::transformed(const Mat& p) const {
  AnalysedObject u = *this;
  switch (kind) {
    case ObjectKind::PointMass: u.x0 = p.transpose() * x0; break;
    case ObjectKind::HyperplaneDelta:
      u.normal = p.transpose() * normal;
      u.offset = p.transpose() * offset;
      break;
    case ObjectKind::Gaussian:
      u.center = p.transpose() * center;
      u.covariance = p.transpose() * covariance * p;
      break;
    case ObjectKind::Grid: {
      // Axis i of the new grid is axis sigma(i) of the old one.
      const int d = grid->dimension();
      const Mat pt = p.transpose();
      std::vector<int> sigma(d);
      for (int i = 0; i < d; ++i) {
        Eigen::Index j;
        pt.row(i).cwiseAbs().maxCoeff(&j);
        if (std::abs(pt(i, j) - 1.0) > 1e-12) throw InvalidArgument("grid signals only support permutation matrices");
        sigma[i] = static_cast<int>(j);
      }
      auto g = std::make_shared<GridSignal>();
      g->spacing = grid->spacing;
      g->origin = pt * grid->origin;
      g->dims.resize(d);
      for (int i = 0; i < d; ++i) g->dims[i] = grid->dims[sigma[i]];
      g->samples.resize(grid->size());
      std::vector<int> from(d);
      for (std::size_t f = 0; f < g->size(); ++f) {
        const auto idx = g->index_of(f);
        for (int i = 0; i < d; ++i) from[sigma[i]] = idx[i];
        g->samples[f] = grid->samples[grid->flat_of(from)];
      }
      u.grid = std::move(g);
      break;
    }
  }
  return u;
}

cplx AnalysedObject::gaussian_hat(const Vec& xi) const {
  if (kind != ObjectKind::Gaussian) throw InvalidArgument("gaussian_hat on a non-Gaussian object");
  const double q = xi.dot(covariance * xi);
  const double ph = -kTwoPi * center.dot(xi);
  return std::exp(-2.0 * kPi * kPi * q) * cplx(std::cos(ph), std::sin(ph));
}

// ---------------------------------------------------------------- plan

namespace {

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

constexpr int kMaxLinePanels = 1 << 14;

// min of eta^T q eta over the box [lo, hi] for positive definite q: every
// pattern of active bounds is tried and the feasible stationary points compared.
double min_quadratic_on_box(const Mat& q, const Vec& lo, const Vec& hi) {
  const int d = static_cast<int>(lo.size());
  int patterns = 1;
  for (int j = 0; j < d; ++j) patterns *= 3;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> state(d);
  for (int code = 0; code < patterns; ++code) {
    int c = code;
    std::vector<int> free_idx;
    Vec eta = Vec::Zero(d);
    for (int j = 0; j < d; ++j) {
      state[j] = c % 3;
      c /= 3;
      if (state[j] == 0) eta[j] = lo[j];
      else if (state[j] == 1) eta[j] = hi[j];
      else free_idx.push_back(j);
    }
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Mat qff(nf, nf);
      Vec rhs = Vec::Zero(nf);
      for (int a = 0; a < nf; ++a) {
        for (int b = 0; b < nf; ++b) qff(a, b) = q(free_idx[a], free_idx[b]);
        for (int j = 0; j < d; ++j)
          if (state[j] != 2) rhs[a] -= q(free_idx[a], j) * eta[j];
      }
      const Vec sol = qff.ldlt().solve(rhs);
      bool feasible = true;
      for (int a = 0; a < nf; ++a) {
        const int j = free_idx[a];
        feasible = feasible && sol[a] >= lo[j] && sol[a] <= hi[j];
        eta[j] = sol[a];
      }
      if (!feasible) continue;
    }
    best = std::min(best, eta.dot(q * eta));
  }
  // Guard against cancellation in the stationary-point solve.
  return std::max(0.0, best * (1.0 - 1e-9));
}

}  // namespace

struct CoefficientPlan::Impl {
  AnalysedObject u;
  BandlimitedWavelet psi;
  GroupElement h;
  double abs_det;

  // hyperplane
  Vec v;  // h^T gamma
  double t0 = 0, t1 = 0;
  bool empty_line = false;
  bool closed_form = false;
  double cf_alpha = 0, cf_beta = 0, cf_const = 0;
  std::unordered_map<double, Valued> memo;

  // gaussian
  double y_radius = 0;
  bool negligible = false;
  double mass_bound = 0;
  double quad_error = 0;
  struct Grid {
    std::vector<std::vector<double>> nodes;  // per axis
    std::vector<double> weights;             // tensor, row-major (axis 0 slowest)
    double l1 = 0;
  } fine, coarse;

  Impl(const AnalysedObject& obj, const BandlimitedWavelet& w, const GroupElement& el, double radius)
      : u(obj), psi(w), h(el), abs_det(std::abs(el.det)) {
    if (u.dimension() != psi.dimension() || h.dimension() != psi.dimension())
      throw InvalidArgument("coefficient: object, wavelet and element dimensions differ");
    switch (u.kind) {
      case ObjectKind::HyperplaneDelta: setup_line(); break;
      case ObjectKind::Gaussian: setup_gaussian(radius); break;
      case ObjectKind::PointMass: break;
      case ObjectKind::Grid: throw InvalidArgument("grid signals use coefficient_grid, not the analytic path");
    }
  }

  // ---- hyperplane: |det h|^{1/2} int psi-hat(t v) e^{2 pi i omega t} dt
  void setup_line() {
    const FrequencyWindow& win = psi.support();
    v = h.matrix.transpose() * u.normal;
    Vec blo, bhi;
    win.bounding_box(blo, bhi);
    t0 = -std::numeric_limits<double>::infinity();
    t1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.size(); ++i) {
      if (v[i] == 0.0) {
        if (!(blo[i] < 0.0 && bhi[i] > 0.0)) empty_line = true;
        continue;
      }
      double a = blo[i] / v[i], b = bhi[i] / v[i];
      if (a > b) std::swap(a, b);
      t0 = std::max(t0, a);
      t1 = std::min(t1, b);
    }
    if (!(t1 > t0)) empty_line = true;
    if (empty_line) return;
    // Single active bump factor: the line integral is a scaled bump_ft.
    if (win.kind == WindowKind::Box) {
      int active = -1, count = 0;
      double c = 1.0;
      for (int i = 0; i < v.size(); ++i) {
        const double wdt = win.hi[i] - win.lo[i];
        if (v[i] == 0.0) {
          c *= bump(-(win.lo[i] + win.hi[i]) / wdt);
        } else {
          active = i;
          ++count;
        }
      }
      if (c == 0.0) {
        empty_line = true;
      } else if (count == 1) {
        const double wdt = win.hi[active] - win.lo[active];
        closed_form = true;
        cf_alpha = 2.0 * v[active] / wdt;
        cf_beta = -(win.lo[active] + win.hi[active]) / wdt;
        cf_const = c;
      }
    } else if (win.kind == WindowKind::ShearletBox) {
      if (v[0] == 0.0) {
        empty_line = true;
      } else if (v.tail(v.size() - 1).isZero(0.0)) {
        closed_form = true;
        cf_alpha = 2.0 * v[0];
        cf_beta = -3.0;
        cf_const = 1.0;
      }
    }
  }

  Valued line(double omega) {
    const double pref = std::sqrt(abs_det) * psi.amplitude();
    if (empty_line) return {0.0, 0.0};
    if (closed_form) {
      const double scale = cf_const / std::abs(cf_alpha);
      const cplx val = scale * expi(-kTwoPi * omega * cf_beta / cf_alpha) * bump_ft(omega / cf_alpha);
      return {pref * val, pref * scale * (bump_ft_abs_error() + 1e-15 * bump_integral())};
    }
    auto it = memo.find(omega);
    if (it != memo.end()) return it->second;
    const GaussRule& rule = gauss_rule(16);
    std::vector<double> x, w;
    double l1 = 0.0;
    auto run = [&](int panels) {
      composite_rule(t0, t1, panels, rule, x, w);
      cplx acc = 0.0;
      l1 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double p = psi.profile(x[k] * v);
        if (p == 0.0) continue;
        acc += w[k] * p * expi(kTwoPi * omega * x[k]);
        l1 += w[k] * p;
      }
      return acc;
    };
    const double len = t1 - t0;
    const double want = 16.0 + std::ceil(std::abs(omega) * len / 2.0);
    const int panels = static_cast<int>(std::min<double>(want, kMaxLinePanels));
    const cplx coarse_v = run(panels);
    const cplx fine_v = run(2 * panels);
    Valued out{pref * fine_v, pref * (std::abs(fine_v - coarse_v) + 1e-15 * l1)};
    memo.emplace(omega, out);
    return out;
  }

  // ---- gaussian: |det h|^{-1/2} int_V G(h^{-T} eta) psi-hat(eta) e^{2 pi i <h^{-1}(y - c), eta>} d eta
  void setup_gaussian(double radius) {
    const FrequencyWindow& win = psi.support();
    Eigen::LLT<Mat> llt(u.covariance);
    const Mat b = Mat(llt.matrixL()).transpose() * h.inv_transpose;  // G = exp(-2 pi^2 |b eta|^2)
    Eigen::JacobiSVD<Mat> svd(b);
    const double smin = svd.singularValues()[b.rows() - 1];
    const double smax = svd.singularValues()[0];
    Vec blo, bhi;
    win.bounding_box(blo, bhi);
    const double m = std::max(smin * win.min_norm(), std::sqrt(min_quadratic_on_box(b.transpose() * b, blo, bhi)));
    mass_bound = std::pow(abs_det, -0.5) * psi.hat_l1() * std::exp(-2.0 * kPi * kPi * m * m);
    if (mass_bound < 1e-250) {
      negligible = true;
      return;
    }
    build_grids(radius, b, smax);
  }

  void build_grids(double radius, const Mat& b, double smax) {
    y_radius = radius;
    inner_memo.clear();
    const FrequencyWindow& win = psi.support();
    const int d = win.dimension;
    Vec blo, bhi;
    win.bounding_box(blo, bhi);
    std::vector<int> panels(d);
    for (int j = 0; j < d; ++j) {
      const double len = bhi[j] - blo[j];
      const double zmax = h.inv_matrix.row(j).norm() * radius;
      panels[j] = 8 + static_cast<int>(std::ceil(zmax * len / 2.0) + std::ceil(len * smax * 3.0));
    }
    const GaussRule& rule = gauss_rule(16);
    auto make = [&](Grid& g, int factor_num, int factor_den) {
      g.nodes.assign(d, {});
      std::vector<std::vector<double>> ws(d);
      for (int j = 0; j < d; ++j) {
        const int p = std::max(2, panels[j] * factor_num / factor_den);
        composite_rule(blo[j], bhi[j], p, rule, g.nodes[j], ws[j]);
      }
      std::size_t total = 1;
      for (int j = 0; j < d; ++j) total *= g.nodes[j].size();
      g.weights.assign(total, 0.0);
      g.l1 = 0.0;
      std::vector<std::size_t> idx(d, 0);
      Vec eta(d);
      for (std::size_t f = 0; f < total; ++f) {
        double wt = 1.0;
        for (int j = 0; j < d; ++j) {
          eta[j] = g.nodes[j][idx[j]];
          wt *= ws[j][idx[j]];
        }
        const double p = psi.profile(eta);
        if (p != 0.0) {
          const double q = (b * eta).squaredNorm();
          g.weights[f] = wt * p * std::exp(-2.0 * kPi * kPi * q);
          g.l1 += std::abs(g.weights[f]);
        }
        for (int j = d - 1; j >= 0; --j) {
          if (++idx[j] < g.nodes[j].size()) break;
          idx[j] = 0;
        }
      }
    };
    make(fine, 1, 1);
    make(coarse, 1, 2);
    // Quadrature error, estimated once per plan at the extreme frequencies
    // z = h^{-1}(y - c) the plan was sized for.
    quad_error = 0.0;
    std::vector<Vec> probes;
    Eigen::JacobiSVD<Mat> svd(h.inv_matrix, Eigen::ComputeFullV);
    for (int j = 0; j < d; ++j) probes.push_back(radius * svd.matrixV().col(j));
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec y(d);
      for (int j = 0; j < d; ++j) y[j] = ((mask >> j) & 1 ? 1.0 : -1.0) * radius / std::sqrt(double(d));
      probes.push_back(y);
    }
    for (const Vec& y : probes) {
      const Vec z = h.inv_matrix * y;
      quad_error = std::max(quad_error, std::abs(grid_sum(fine, z) - grid_sum(coarse, z)));
    }
    quad_error += std::abs(grid_sum(fine, Vec::Zero(d)) - grid_sum(coarse, Vec::Zero(d)));
    // Drop weights that cannot matter at double precision.
    const double cut = 1e-17 * fine.l1;
    for (double& w : fine.weights)
      if (std::abs(w) < cut) {
        quad_error += std::abs(w);
        w = 0.0;
      }
  }

  static cplx grid_sum(const Grid& g, const Vec& z) {
    const int d = static_cast<int>(g.nodes.size());
    if (d == 2) {
      const std::size_t n0 = g.nodes[0].size(), n1 = g.nodes[1].size();
      std::vector<cplx> e1(n1);
      for (std::size_t k = 0; k < n1; ++k) e1[k] = expi(kTwoPi * z[1] * g.nodes[1][k]);
      cplx acc = 0.0;
      for (std::size_t j = 0; j < n0; ++j) {
        const double* row = &g.weights[j * n1];
        cplx inner = 0.0;
        for (std::size_t k = 0; k < n1; ++k)
          if (row[k] != 0.0) inner += row[k] * e1[k];
        if (inner != 0.0) acc += inner * expi(kTwoPi * z[0] * g.nodes[0][j]);
      }
      return acc;
    }
    std::vector<std::size_t> idx(d, 0);
    cplx acc = 0.0;
    for (std::size_t f = 0; f < g.weights.size(); ++f) {
      if (g.weights[f] != 0.0) {
        double ph = 0.0;
        for (int j = 0; j < d; ++j) ph += z[j] * g.nodes[j][idx[j]];
        acc += g.weights[f] * expi(kTwoPi * ph);
      }
      for (int j = d - 1; j >= 0; --j) {
        if (++idx[j] < g.nodes[j].size()) break;
        idx[j] = 0;
      }
    }
    return acc;
  }

  // Inner sums over the second axis, keyed by z_2. Points on a lattice share
  // z_2 whenever h^{-1} is triangular, which makes repeated calls cheap.
  std::unordered_map<double, std::vector<cplx>> inner_memo;

  cplx fine_sum_2d(const Vec& z) {
    const std::size_t n0 = fine.nodes[0].size(), n1 = fine.nodes[1].size();
    auto it = inner_memo.find(z[1]);
    if (it == inner_memo.end()) {
      if (inner_memo.size() > 8192) inner_memo.clear();
      std::vector<cplx> e1(n1), inner(n0, 0.0);
      for (std::size_t k = 0; k < n1; ++k) e1[k] = expi(kTwoPi * z[1] * fine.nodes[1][k]);
      for (std::size_t j = 0; j < n0; ++j) {
        const double* row = &fine.weights[j * n1];
        cplx acc = 0.0;
        for (std::size_t k = 0; k < n1; ++k)
          if (row[k] != 0.0) acc += row[k] * e1[k];
        inner[j] = acc;
      }
      it = inner_memo.emplace(z[1], std::move(inner)).first;
    }
    const std::vector<cplx>& inner = it->second;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n0; ++j)
      if (inner[j] != 0.0) acc += inner[j] * expi(kTwoPi * z[0] * fine.nodes[0][j]);
    return acc;
  }

  Valued gaussian(const Vec& y) {
    if (negligible) return {0.0, mass_bound};
    const double r = (y - u.center).norm();
    if (r > y_radius) {
      Eigen::LLT<Mat> llt(u.covariance);
      const Mat b = Mat(llt.matrixL()).transpose() * h.inv_transpose;
      Eigen::JacobiSVD<Mat> svd(b);
      build_grids(std::max(2.0 * y_radius, r), b, svd.singularValues()[0]);
    }
    const Vec z = h.inv_matrix * (y - u.center);
    const double pref = std::pow(abs_det, -0.5) * psi.amplitude();
    const cplx f = fine.nodes.size() == 2 ? fine_sum_2d(z) : grid_sum(fine, z);
    return {pref * f, pref * (quad_error + 1e-15 * fine.l1)};
  }

  Valued point_mass(const Vec& y) {
    const Valued s = psi.spatial_eval(h.inv_matrix * (u.x0 - y));
    const double pref = std::pow(abs_det, -0.5);
    return {pref * std::conj(s.value), pref * s.error};
  }

  Valued eval(const Vec& y) {
    if (y.size() != u.dimension()) throw InvalidArgument("coefficient: y has wrong dimension");
    switch (u.kind) {
      case ObjectKind::PointMass: return point_mass(y);
      case ObjectKind::HyperplaneDelta: return line((y - u.offset).dot(u.normal));
      case ObjectKind::Gaussian: return gaussian(y);
      case ObjectKind::Grid: break;
    }
    throw InvalidArgument("grid signals use coefficient_grid");
  }
};

CoefficientPlan::CoefficientPlan(const AnalysedObject& u, const BandlimitedWavelet& psi, const GroupElement& h,
                                 double y_radius)
    : impl_(std::make_unique<Impl>(u, psi, h, y_radius)) {}
CoefficientPlan::~CoefficientPlan() = default;
CoefficientPlan::CoefficientPlan(CoefficientPlan&&) noexcept = default;
CoefficientPlan& CoefficientPlan::operator=(CoefficientPlan&&) noexcept = default;

Valued CoefficientPlan::operator()(const Vec& y) { return impl_->eval(y); }

Valued coefficient_analytic(const AnalysedObject& u, const BandlimitedWavelet& psi, const Vec& y,
                            const GroupElement& h) {
  const double r = u.kind == ObjectKind::Gaussian ? (y - u.center).norm() + 1e-9 : 1.0;
  CoefficientPlan plan(u, psi, h, r);
  return plan(y);
}

}  // namespace wf
