#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <fftw3.h>
#include <fmt/format.h>

#include "wavefront/transform.hpp"

namespace wf {

std::size_t GridSignal::size() const {
  std::size_t n = 1;
  for (int k : dims) n *= static_cast<std::size_t>(k);
  return n;
}

std::vector<int> GridSignal::index_of(std::size_t flat) const {
  std::vector<int> idx(dims.size());
  for (std::size_t j = dims.size(); j-- > 0;) {
    idx[j] = static_cast<int>(flat % dims[j]);
    flat /= dims[j];
  }
  return idx;
}

std::size_t GridSignal::flat_of(const std::vector<int>& index) const {
  std::size_t f = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) f = f * dims[j] + index[j];
  return f;
}

Vec GridSignal::point(std::size_t flat) const {
  const auto idx = index_of(flat);
  Vec x(dimension());
  for (int j = 0; j < dimension(); ++j) x[j] = origin[j] + idx[j] * spacing;
  return x;
}

void GridSignal::validate(bool require_power_of_two) const {
  if (dims.empty()) throw InvalidArgument("grid has no dimensions");
  if (!(spacing > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (origin.size() != dimension()) throw InvalidArgument("grid origin has wrong dimension");
  for (int n : dims) {
    if (n < 1) throw InvalidArgument("grid sizes must be positive");
    if (require_power_of_two && (n & (n - 1)) != 0)
      throw InvalidArgument(fmt::format("grid size {} is not a power of two", n));
  }
  if (samples.size() != size()) throw InvalidArgument("grid sample count does not match its dimensions");
}

// ---------------------------------------------------------------- FFT path

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void run_fft(const std::vector<int>& dims, std::vector<cplx>& data, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

GridTransformer::GridTransformer(std::shared_ptr<const GridSignal> signal) : signal_(std::move(signal)) {
  if (!signal_) throw InvalidArgument("GridTransformer needs a signal");
  signal_->validate(true);
  spectrum_ = signal_->samples;
  run_fft(signal_->dims, spectrum_, FFTW_FORWARD);
}

GridTransformer::~GridTransformer() = default;

Vec GridTransformer::frequency(std::size_t flat) const {
  const auto idx = signal_->index_of(flat);
  Vec xi(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const int n = signal_->dims[j];
    const int k = idx[j] < n / 2 ? idx[j] : idx[j] - n;
    xi[j] = k / (n * signal_->spacing);
  }
  return xi;
}

CoefficientField GridTransformer::field(const BandlimitedWavelet& psi, const GroupElement& h) const {
  const GridSignal& s = *signal_;
  if (psi.dimension() != s.dimension() || h.dimension() != s.dimension())
    throw InvalidArgument("coefficient_grid: dimension mismatch");
  // Support of the multiplier is h^{-T} V; it must sit inside the Nyquist box.
  const double nyq = 0.5 / s.spacing;
  Vec blo, bhi;
  psi.support().bounding_box(blo, bhi);
  const int d = s.dimension();
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec c(d);
    for (int j = 0; j < d; ++j) c[j] = (mask >> j) & 1 ? bhi[j] : blo[j];
    const Vec img = h.inv_transpose * c;
    if ((img.array().abs() >= nyq).any())
      throw DomainError(fmt::format("aliasing: h^{{-T}} supp(psi-hat) reaches max_j |xi_j| = {:.4g} beyond the Nyquist "
                                    "frequency {:.4g}",
                                    img.cwiseAbs().maxCoeff(), nyq));
  }
  std::vector<cplx> work(spectrum_.size());
  const Mat ht = h.matrix.transpose();
  for (std::size_t f = 0; f < work.size(); ++f) {
    const double p = psi.hat(ht * frequency(f));
    work[f] = p == 0.0 ? cplx(0.0) : spectrum_[f] * p;
  }
  run_fft(s.dims, work, FFTW_BACKWARD);
  const double scale = std::sqrt(std::abs(h.det)) / static_cast<double>(work.size());
  for (auto& w : work) w *= scale;
  CoefficientField out;
  out.h = h;
  out.dims = s.dims;
  out.spacing = s.spacing;
  out.origin = s.origin;
  out.values = std::move(work);
  return out;
}

CoefficientField coefficient_grid(const GridSignal& u, const BandlimitedWavelet& psi, const GroupElement& h) {
  GridTransformer t(std::make_shared<const GridSignal>(u));
  return t.field(psi, h);
}

// ---------------------------------------------------------------- synthesis

GridSignal synthesize_signal(const AnalysedObject& u, const std::vector<int>& dims, double spacing,
                             const Vec& origin) {
  GridSignal g;
  g.dims = dims;
  g.spacing = spacing;
  g.origin = origin;
  g.samples.assign(g.size(), 0.0);
  g.validate(false);
  if (u.dimension() != g.dimension()) throw InvalidArgument("synthesize_signal: dimension mismatch");
  const int d = g.dimension();
  switch (u.kind) {
    case ObjectKind::PointMass: {
      std::vector<int> idx(d);
      for (int j = 0; j < d; ++j) {
        idx[j] = static_cast<int>(std::lround((u.x0[j] - origin[j]) / spacing));
        if (idx[j] < 0 || idx[j] >= dims[j]) throw InvalidArgument("point mass lies outside the grid");
      }
      g.samples[g.flat_of(idx)] = std::pow(spacing, -d);
      break;
    }
    case ObjectKind::HyperplaneDelta:
      for (std::size_t f = 0; f < g.size(); ++f) {
        if (std::abs((g.point(f) - u.offset).dot(u.normal)) < 0.5 * spacing) g.samples[f] = 1.0 / spacing;
      }
      break;
    case ObjectKind::Gaussian: {
      Eigen::LLT<Mat> llt(u.covariance);
      const Mat l = llt.matrixL();
      const double det = l.diagonal().prod();
      const double norm = std::pow(kTwoPi, -0.5 * d) / det;
      for (std::size_t f = 0; f < g.size(); ++f) {
        const Vec r = llt.matrixL().solve(g.point(f) - u.center);
        g.samples[f] = norm * std::exp(-0.5 * r.squaredNorm());
      }
      break;
    }
    case ObjectKind::Grid: throw InvalidArgument("synthesize_signal: object is already a grid");
  }
  return g;
}

// ---------------------------------------------------------------- files

namespace {

void put_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(std::istream& is) {
  std::uint64_t bits = 0;
  is.read(reinterpret_cast<char*>(&bits), sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_grid(const std::string& path, const GridSignal& g, bool complex_values) {
  g.validate(false);
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw Error("cannot write " + path + ".hdr");
  hdr << "format wavefront-grid 1\n";
  hdr << "dims";
  for (int n : g.dims) hdr << ' ' << n;
  hdr << "\nspacing " << fmt::format("{:.17g}", g.spacing) << "\norigin";
  for (int j = 0; j < g.dimension(); ++j) hdr << ' ' << fmt::format("{:.17g}", g.origin[j]);
  hdr << "\nvalues " << (complex_values ? "complex" : "real") << "\nbyte_order little\n";
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot write " + path);
  for (const cplx& s : g.samples) {
    put_le(bin, s.real());
    if (complex_values) put_le(bin, s.imag());
  }
}

GridSignal read_grid(const std::string& path) {
  std::ifstream hdr(path + ".hdr");
  if (!hdr) throw InvalidArgument("missing grid header " + path + ".hdr");
  GridSignal g;
  bool complex_values = false;
  std::string line;
  while (std::getline(hdr, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "dims") {
      int n;
      while (ls >> n) g.dims.push_back(n);
    } else if (key == "spacing") {
      ls >> g.spacing;
    } else if (key == "origin") {
      std::vector<double> o;
      double x;
      while (ls >> x) o.push_back(x);
      g.origin = Eigen::Map<Vec>(o.data(), static_cast<Eigen::Index>(o.size()));
    } else if (key == "values") {
      std::string kind;
      ls >> kind;
      complex_values = kind == "complex";
    }
  }
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw InvalidArgument("missing grid data " + path);
  g.samples.resize(g.size());
  for (auto& s : g.samples) {
    const double re = get_le(bin);
    const double im = complex_values ? get_le(bin) : 0.0;
    s = {re, im};
  }
  if (!bin) throw InvalidArgument("grid data file is shorter than its header says");
  g.validate(false);
  return g;
}

void write_field_csv(const std::string& path, const CoefficientField& f, const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  if (!header_comment.empty()) os << "# " << header_comment << '\n';
  os << "index,real,imag\n";
  for (std::size_t k = 0; k < f.values.size(); ++k)
    os << k << ',' << fmt::format("{:.17g},{:.17g}", f.values[k].real(), f.values[k].imag()) << '\n';
}

}  // namespace wf
