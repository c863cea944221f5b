#include "wavefront/wavelet.hpp"

#include <cmath>

#include <fmt/format.h>

namespace wf {

namespace {

double angular_profile(const DirectionPatch& w, const Vec& u) {
  switch (w.kind) {
    case PatchKind::SphericalCap: return bump((u - w.center).norm() / w.radius);
    case PatchKind::ShearletAxisBand: return u[0] > 0 ? bump((1.0 - u[0]) / w.eps) : 0.0;
    case PatchKind::DiagonalBand: {
      const double sd = std::sqrt(static_cast<double>(w.dimension));
      const double scale = std::log1p(w.eps);
      double p = 1.0;
      for (int i = 0; i < w.dimension && p > 0.0; ++i) {
        if (!(u[i] > 0.0)) return 0.0;
        p *= bump(std::log(sd * u[i]) / scale);
      }
      return p;
    }
  }
  return 0.0;
}

cplx expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

BandlimitedWavelet::BandlimitedWavelet(FrequencyWindow support, double kappa)
    : support_(std::move(support)), kappa_(kappa) {
  support_.validate();
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("wavelet normalization must be positive");
}

BandlimitedWavelet BandlimitedWavelet::with_kappa(double kappa) const {
  BandlimitedWavelet w = *this;
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("wavelet normalization must be positive");
  w.kappa_ = kappa;
  return w;
}

double BandlimitedWavelet::profile(const Vec& xi) const {
  const FrequencyWindow& v = support_;
  switch (v.kind) {
    case WindowKind::Ball: return bump((xi - v.center).norm() / v.radius);
    case WindowKind::Box: {
      double p = 1.0;
      for (int i = 0; i < v.dimension && p > 0.0; ++i) p *= bump((2.0 * xi[i] - v.lo[i] - v.hi[i]) / (v.hi[i] - v.lo[i]));
      return p;
    }
    case WindowKind::ShearletBox: {
      const double p = bump(2.0 * xi[0] - 3.0);
      return p > 0.0 ? p * bump(xi.tail(v.dimension - 1).norm()) : 0.0;
    }
    case WindowKind::AnnulusSector: {
      const double r = xi.norm();
      const double p = bump((2.0 * r - v.r_min - v.r_max) / (v.r_max - v.r_min));
      return p > 0.0 ? p * angular_profile(*v.sector, xi / r) : 0.0;
    }
  }
  return 0.0;
}

cplx BandlimitedWavelet::dilated_hat(const Vec& x, const GroupElement& h, const Vec& xi) const {
  const double p = hat(h.matrix.transpose() * xi);
  if (p == 0.0) return 0.0;
  return std::sqrt(std::abs(h.det)) * p * expi(-kTwoPi * x.dot(xi));
}

namespace {

// Tensor Gauss quadrature of profile * e^{2 pi i <z, xi>} over the bounding
// box; error from the comparison with half as many panels per axis.
Valued tensor_spatial(const BandlimitedWavelet& w, const Vec& z) {
  const FrequencyWindow& v = w.support();
  const int d = v.dimension;
  Vec blo, bhi;
  v.bounding_box(blo, bhi);
  const GaussRule& rule = gauss_rule(16);
  auto run = [&](int base) {
    std::vector<std::vector<double>> xs(d), ws(d);
    for (int i = 0; i < d; ++i) {
      const int p = base + static_cast<int>(std::ceil(std::abs(z[i]) * (bhi[i] - blo[i]) / 2.0));
      composite_rule(blo[i], bhi[i], p, rule, xs[i], ws[i]);
    }
    cplx acc = 0.0;
    std::vector<std::size_t> idx(d, 0);
    Vec xi(d);
    for (;;) {
      double wt = 1.0;
      for (int i = 0; i < d; ++i) {
        xi[i] = xs[i][idx[i]];
        wt *= ws[i][idx[i]];
      }
      const double p = w.profile(xi);
      if (p != 0.0) acc += wt * p * expi(kTwoPi * z.dot(xi));
      int k = 0;
      while (k < d && ++idx[k] == xs[k].size()) idx[k++] = 0;
      if (k == d) break;
    }
    return acc;
  };
  const int base = d == 2 ? 16 : 6;
  const cplx coarse = run(base);
  const cplx fine = run(2 * base);
  return {w.amplitude() * fine, w.amplitude() * std::abs(fine - coarse)};
}

}  // namespace

Valued BandlimitedWavelet::spatial_eval(const Vec& z) const {
  if (z.size() != dimension()) throw InvalidArgument("spatial_eval: dimension mismatch");
  const FrequencyWindow& v = support_;
  const double eps = bump_ft_abs_error();
  const int d = v.dimension;
  switch (v.kind) {
    case WindowKind::Box: {
      cplx acc = 1.0;
      double err_rel = 0.0, scale = 1.0;
      for (int i = 0; i < d; ++i) {
        const double half = 0.5 * (v.hi[i] - v.lo[i]);
        const double mid = 0.5 * (v.hi[i] + v.lo[i]);
        acc *= half * expi(kTwoPi * z[i] * mid) * bump_ft(z[i] * half);
        scale *= half * bump_integral();
        err_rel += eps / bump_integral();
      }
      return {amplitude() * acc, amplitude() * scale * err_rel};
    }
    case WindowKind::ShearletBox: {
      const double f1 = 0.5 * bump_ft(0.5 * z[0]);
      const double rho = z.tail(d - 1).norm();
      const double f2 = radial_bump_ft(d - 1, rho);
      const double e1 = 0.5 * eps;
      const double e2 = d == 2 ? eps : 1e-13 * radial_bump_ft(d - 1, 0.0);
      const cplx val = expi(kTwoPi * 1.5 * z[0]) * f1 * f2;
      const double err = std::abs(f1) * e2 + std::abs(f2) * e1 + e1 * e2;
      return {amplitude() * val, amplitude() * err};
    }
    case WindowKind::Ball: {
      const double rd = std::pow(v.radius, d);
      const cplx val = expi(kTwoPi * z.dot(v.center)) * rd * radial_bump_ft(d, v.radius * z.norm());
      return {amplitude() * val, amplitude() * rd * 1e-13 * radial_bump_ft(d, 0.0)};
    }
    case WindowKind::AnnulusSector: return tensor_spatial(*this, z);
  }
  return {};
}

double BandlimitedWavelet::hat_l1() const {
  return spatial_eval(Vec::Zero(dimension())).value.real();
}

Estimate admissibility_integral(const DilationGroup& group, const BandlimitedWavelet& psi, const Vec& xi,
                                const AdmissibilityOptions& opts) {
  if (psi.dimension() != group.dimension()) throw InvalidArgument("wavelet and group dimensions differ");
  if (!group.in_open_orbit(xi)) throw DomainError("admissibility_integral: xi outside the open orbit");
  StayChart chart = stay_chart(group, xi, psi.support());
  DualIntegrand f = [&psi](const Vec& eta) {
    const double p = psi.hat(eta);
    return p * p;
  };
  if (group.dimension() == 2 && chart.box_complete) return integrate_stay_gl(chart, f, opts.panels);
  return integrate_stay_mc(chart, f, opts.mc_samples, opts.seed);
}

BandlimitedWavelet normalize(const DilationGroup& group, const BandlimitedWavelet& psi,
                             const AdmissibilityOptions& opts) {
  const Estimate e = admissibility_integral(group, psi, group.orbit().base_point, opts);
  if (!(e.value > 1e-300) || !std::isfinite(e.value))
    throw NumericalError(fmt::format("admissibility integral is numerically zero ({}); the window misses the "
                                     "sampled stay region",
                                     e.value));
  BandlimitedWavelet out = psi.with_kappa(psi.kappa() / e.value);
  out.group = group.spec();
  return out;
}

}  // namespace wf
