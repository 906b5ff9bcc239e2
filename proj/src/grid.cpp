#include "okpf/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "okpf/error.hpp"

namespace okpf {

GridSpec GridSpec::square(int n, double length) { return make(2, {n, n, 1}, {length, length, 1.0}); }

GridSpec GridSpec::cube(int n, double length) { return make(3, {n, n, n}, {length, length, length}); }

GridSpec GridSpec::make(int dim, std::array<int, 3> points, std::array<double, 3> lengths) {
  GridSpec g;
  g.dim = dim;
  g.points = points;
  g.lengths = lengths;
  if (dim == 2) {
    g.points[2] = 1;
    g.lengths[2] = 1.0;
  }
  g.validate();
  return g;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points[a]);
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= lengths[a];
  return v;
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) throw Error(Errc::invalid_argument, "grid dim must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (points[a] < 4 || points[a] % 2 != 0) {
      std::ostringstream os;
      os << "grid axis " << a << ": point count " << points[a] << " must be even and >= 4";
      throw Error(Errc::invalid_argument, os.str());
    }
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      std::ostringstream os;
      os << "grid axis " << a << ": length must be positive";
      throw Error(Errc::invalid_argument, os.str());
    }
  }
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (dim != o.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (points[a] != o.points[a] || lengths[a] != o.lengths[a]) return false;
  return true;
}

Field::Field(const GridSpec& g, double fill) : grid(g), values(g.size(), fill) {}

Field::Field(const GridSpec& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw Error(Errc::invalid_field, "sample count does not match grid");
}

void require_finite(const Field& f, const char* name) {
  if (f.values.size() != f.grid.size())
    throw Error(Errc::invalid_field, std::string(name) + ": sample count does not match grid");
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (!std::isfinite(f.values[n])) {
      std::ostringstream os;
      os << name << ": non-finite sample at index " << n;
      throw Error(Errc::invalid_field, os.str());
    }
  }
}

void require_same_grid(const Field& a, const Field& b) {
  if (a.grid != b.grid) throw Error(Errc::grid_mismatch, "fields live on different grids");
}

namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the whole process; they are never destroyed, so handing out
// raw handles is fine.
PlanPair plans_for(const GridSpec& g, double* real, fftw_complex* cplx) {
  using Key = std::tuple<int, int, int, int>;
  static std::map<Key, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  Key key{g.dim, g.points[0], g.points[1], g.points[2]};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int n[3];
  if (g.dim == 2) {
    n[0] = g.points[1];
    n[1] = g.points[0];
  } else {
    n[0] = g.points[2];
    n[1] = g.points[1];
    n[2] = g.points[0];
  }
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c(g.dim, n, real, cplx, FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r(g.dim, n, cplx, real, FFTW_ESTIMATE);
  if (!p.r2c || !p.c2r) throw Error(Errc::invalid_argument, "FFTW planning failed");
  cache.emplace(key, p);
  return p;
}

std::size_t half_modes(const GridSpec& g) {
  std::size_t n = static_cast<std::size_t>(g.points[0] / 2 + 1);
  for (int a = 1; a < g.dim; ++a) n *= static_cast<std::size_t>(g.points[a]);
  return n;
}

}  // namespace

struct Spectral::Buffers {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  PlanPair plan;
  ~Buffers() {
    fftw_free(real);
    fftw_free(cplx);
  }
};

Spectral::Spectral(const GridSpec& g) : grid_(g), buf_(std::make_unique<Buffers>()) {
  grid_.validate();
  const std::size_t nc = half_modes(grid_);
  buf_->real = fftw_alloc_real(grid_.size());
  buf_->cplx = fftw_alloc_complex(nc);
  if (!buf_->real || !buf_->cplx) throw std::bad_alloc();
  buf_->plan = plans_for(grid_, buf_->real, buf_->cplx);

  const int nxh = grid_.points[0] / 2 + 1;
  const int ny = grid_.points[1];
  const int nz = grid_.dim == 3 ? grid_.points[2] : 1;
  const double two_pi = 2.0 * std::numbers::pi;
  auto wave = [&](int idx, int axis) {
    const int n = grid_.points[axis];
    const int m = idx <= n / 2 ? idx : idx - n;
    return two_pi * m / grid_.lengths[axis];
  };
  k2_.resize(nc);
  weight_.resize(nc);
  std::size_t c = 0;
  for (int iz = 0; iz < nz; ++iz) {
    const double kz = grid_.dim == 3 ? wave(iz, 2) : 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      const double ky = wave(iy, 1);
      for (int ix = 0; ix < nxh; ++ix, ++c) {
        const double kx = two_pi * ix / grid_.lengths[0];
        k2_[c] = kx * kx + ky * ky + kz * kz;
        weight_[c] = (ix == 0 || 2 * ix == grid_.points[0]) ? 1.0 : 2.0;
      }
    }
  }
}

Spectral::~Spectral() = default;

void Spectral::forward(const double* in, std::complex<double>* out) {
  const std::size_t n = grid_.size();
  std::copy(in, in + n, buf_->real);
  fftw_execute_dft_r2c(buf_->plan.r2c, buf_->real, buf_->cplx);
  const auto* src = reinterpret_cast<const std::complex<double>*>(buf_->cplx);
  std::copy(src, src + modes(), out);
}

void Spectral::inverse(const std::complex<double>* in, double* out) {
  const std::size_t n = grid_.size();
  auto* dst = reinterpret_cast<std::complex<double>*>(buf_->cplx);
  std::copy(in, in + modes(), dst);
  fftw_execute_dft_c2r(buf_->plan.c2r, buf_->cplx, buf_->real);
  const double s = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf_->real[i] * s;
}

std::vector<std::complex<double>> Spectral::forward(const Field& f) {
  if (f.grid != grid_) throw Error(Errc::grid_mismatch, "field grid differs from transform grid");
  std::vector<std::complex<double>> c(modes());
  forward(f.values.data(), c.data());
  return c;
}

Field Spectral::inverse(const std::vector<std::complex<double>>& c) {
  Field f(grid_);
  inverse(c.data(), f.values.data());
  return f;
}

double Spectral::dirichlet(const std::vector<std::complex<double>>& c) const {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += weight_[i] * k2_[i] * std::norm(c[i]);
  return s * grid_.cell_volume() / static_cast<double>(grid_.size());
}

Field poisson_solve(const Field& w) {
  require_finite(w, "poisson_solve input");
  Spectral sp(w.grid);
  auto c = sp.forward(w);
  const auto& k2 = sp.k2();
  c[0] = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) c[i] /= k2[i];
  return sp.inverse(c);
}

Field laplacian(const Field& f) {
  require_finite(f, "laplacian input");
  Spectral sp(f.grid);
  auto c = sp.forward(f);
  const auto& k2 = sp.k2();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= -k2[i];
  return sp.inverse(c);
}

double integrate(const Field& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.cell_volume();
}

double dirichlet_energy(const Field& f) {
  require_finite(f, "dirichlet_energy input");
  Spectral sp(f.grid);
  return sp.dirichlet(sp.forward(f));
}

Field circular_shift(const Field& f, std::array<int, 3> s) {
  const auto& g = f.grid;
  Field out(g);
  const int nx = g.points[0], ny = g.points[1], nz = g.dim == 3 ? g.points[2] : 1;
  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        out.at(wrap(i + s[0], nx), wrap(j + s[1], ny), g.dim == 3 ? wrap(k + s[2], nz) : 0) =
            f.at(i, j, k);
  return out;
}

}  // namespace okpf
