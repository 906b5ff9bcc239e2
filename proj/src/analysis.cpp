#include "okpf/analysis.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "okpf/error.hpp"

namespace okpf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct LinearFit {
  double a = 0.0, b = 0.0, sse = 0.0, grad_p = 0.0;
};

// least squares y = a + b x with x = m^-p; grad_p is d(sse)/dp at the optimum (a, b)
LinearFit linear_fit(const std::vector<std::pair<double, double>>& pts, double p) {
  const double n = static_cast<double>(pts.size());
  double xm = 0.0, ym = 0.0;
  for (const auto& [m, y] : pts) {
    xm += std::pow(m, -p);
    ym += y;
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0, scale = 0.0;
  for (const auto& [m, y] : pts) {
    const double x = std::pow(m, -p);
    sxx += (x - xm) * (x - xm);
    sxy += (x - xm) * (y - ym);
    scale += x * x;
  }
  if (!(sxx > 1e-24 * scale)) throw Error(Errc::degenerate, "fit: degenerate design matrix");
  LinearFit f;
  f.b = sxy / sxx;
  f.a = ym - f.b * xm;
  for (const auto& [m, y] : pts) {
    const double x = std::pow(m, -p);
    const double r = y - f.a - f.b * x;
    f.sse += r * r;
    f.grad_p += 2.0 * f.b * r * std::log(m) * x;
  }
  return f;
}

std::vector<double> marginal(const Field& w, int axis) {
  const auto& g = w.grid;
  std::vector<double> m(g.points[axis], 0.0);
  const double weight = g.cell_volume() / g.spacing(axis);
  const int nz = g.dim == 3 ? g.points[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.points[1]; ++j)
      for (int i = 0; i < g.points[0]; ++i) {
        const int c = axis == 0 ? i : axis == 1 ? j : k;
        m[c] += w.at(i, j, k) * weight;
      }
  return m;
}

// dipole of the marginal's trigonometric interpolant shifted by t
struct AxisDipole {
  double L;
  std::vector<std::complex<double>> M;  // M_j for j = 1 .. N/2-1
  std::vector<double> k;
  double scale;

  AxisDipole(const std::vector<double>& m, double length) : L(length) {
    const int N = static_cast<int>(m.size());
    for (int j = 1; j < N / 2; ++j) {
      std::complex<double> s = 0.0;
      for (int i = 0; i < N; ++i) s += m[i] * std::polar(1.0, -two_pi * j * i / N);
      M.push_back(s);
      k.push_back(two_pi * j / L);
    }
    scale = 2.0 * L / N;
  }

  double operator()(double t) const {
    double h = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j) h += (M[j] * std::polar(1.0, k[j] * t)).imag() / k[j];
    return scale * h;
  }

  double magnitude() const {
    double s = 0.0;
    for (std::size_t j = 0; j < M.size(); ++j) s += std::abs(M[j]) / k[j];
    return scale * s;
  }
};

double l1_norm(const Field& w) {
  double s = 0.0;
  for (double x : w.values) s += std::abs(x);
  return s * w.grid.cell_volume();
}

double sample(const Field& f, const std::array<double, 3>& x) {
  const auto& g = f.grid;
  int i0[3] = {0, 0, 0};
  double fr[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    const double s = x[a] / g.spacing(a);
    const double fl = std::floor(s);
    fr[a] = s - fl;
    const long n = g.points[a];
    i0[a] = static_cast<int>(((static_cast<long>(fl) % n) + n) % n);
  }
  const int corners = g.dim == 3 ? 8 : 4;
  double out = 0.0;
  for (int c = 0; c < corners; ++c) {
    int idx[3] = {0, 0, 0};
    double wgt = 1.0;
    for (int a = 0; a < g.dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = (i0[a] + bit) % g.points[a];
      wgt *= bit ? fr[a] : 1.0 - fr[a];
    }
    out += wgt * f.at(idx[0], idx[1], idx[2]);
  }
  return out;
}

}  // namespace

FitResult fit_energy_mass(const std::vector<std::pair<double, double>>& points, std::optional<double> fix_p) {
  if (points.size() < 3) throw Error(Errc::invalid_argument, "fit: need at least 3 points");
  for (const auto& [m, y] : points)
    if (!(m > 0.0) || !std::isfinite(m) || !std::isfinite(y))
      throw Error(Errc::invalid_argument, "fit: masses must be positive and values finite");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].first == points[j].first) throw Error(Errc::degenerate, "fit: masses must be distinct");

  double p;
  if (fix_p) {
    p = *fix_p;
  } else {
    constexpr double lo = 0.25, hi = 3.0;
    constexpr int n = 55;
    auto sse = [&](double q) { return linear_fit(points, q).sse; };
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
      const double v = sse(lo + (hi - lo) * i / n);
      if (v < best_v) {
        best_v = v;
        best = i;
      }
    }
    const double a = lo + (hi - lo) * std::max(best - 1, 0) / n;
    const double b = lo + (hi - lo) * std::min(best + 1, n) / n;
    p = boost::math::tools::brent_find_minima(sse, a, b, std::numeric_limits<double>::digits).first;
    // polish on the stationarity condition, which Brent only resolves to sqrt(eps)
    auto g = [&](double q) { return linear_fit(points, q).grad_p; };
    const double d = 1e-4 * std::max(1.0, p);
    const double pl = std::max(lo, p - d), ph = std::min(hi, p + d);
    const double gl = g(pl), gh = g(ph);
    if (gl * gh < 0.0) {
      std::uintmax_t it = 100;
      auto r = boost::math::tools::toms748_solve(g, pl, ph, gl, gh,
                                                 boost::math::tools::eps_tolerance<double>(52), it);
      const double pr = 0.5 * (r.first + r.second);
      if (sse(pr) <= sse(p)) p = pr;
    }
  }
  const LinearFit f = linear_fit(points, p);
  return {f.a, f.b, p, std::sqrt(f.sse / static_cast<double>(points.size()))};
}

std::array<double, 3> dipole_moment(const Field& w) {
  w.grid.validate();
  std::array<double, 3> d{0.0, 0.0, 0.0};
  for (int a = 0; a < w.grid.dim; ++a) d[a] = AxisDipole(marginal(w, a), w.grid.lengths[a])(0.0);
  return d;
}

Field fourier_shift(const Field& f, const std::array<double, 3>& t) {
  const auto& g = f.grid;
  g.validate();
  Spectral sp(g);
  auto c = sp.forward(f);
  const int hx = g.points[0] / 2 + 1, ny = g.points[1];
  const int nz = g.dim == 3 ? g.points[2] : 1;
  auto factor = [&](int axis, int idx) -> std::complex<double> {
    const int N = g.points[axis];
    const int j = idx <= N / 2 ? idx : idx - N;
    const double k = two_pi * j / g.lengths[axis];
    const double ta = t[axis];
    if (2 * std::abs(j) == N) return std::cos(k * ta);
    return std::polar(1.0, k * ta);
  };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < hx; ++i) {
        std::complex<double> ph = factor(0, i) * factor(1, j);
        if (g.dim == 3) ph *= factor(2, k);
        c[static_cast<std::size_t>(i) + static_cast<std::size_t>(hx) * (j + static_cast<std::size_t>(ny) * k)] *= ph;
      }
  return sp.inverse(c);
}

DipoleShift zero_dipole_shift(const Field& w) {
  const auto& g = w.grid;
  g.validate();
  require_finite(w, "w");
  const double norm = l1_norm(w);
  if (std::abs(integrate(w)) > 1e-10 * norm)
    throw Error(Errc::invalid_argument, "zero_dipole_shift: field has nonzero total mass");

  DipoleShift out;
  for (int a = 0; a < g.dim; ++a) {
    const AxisDipole h(marginal(w, a), g.lengths[a]);
    if (!(h.magnitude() > 1e-14 * std::max(norm, std::numeric_limits<double>::min()) * g.lengths[a])) {
      out.flat[a] = true;
      continue;
    }
    const int N = g.points[a];
    const double dx = g.spacing(a);
    double t = 0.0;
    double h0 = h(0.0);
    if (std::abs(h0) > 1e-13 * norm * g.lengths[a]) {
      bool found = false;
      for (int s = 1; s <= N && !found; ++s) {
        const double t1 = s * dx, h1 = h(t1);
        if (h1 == 0.0) {
          t = t1;
          found = true;
        } else if ((h0 < 0.0) != (h1 < 0.0)) {
          std::uintmax_t it = 200;
          auto r = boost::math::tools::toms748_solve(h, t1 - dx, t1, h0, h1,
                                                     boost::math::tools::eps_tolerance<double>(52), it);
          t = 0.5 * (r.first + r.second);
          found = true;
        }
        h0 = h1;
      }
      if (!found) throw Error(Errc::degenerate, "zero_dipole_shift: no sign change of the marginal dipole");
    }
    out.shift[a] = std::fmod(t, g.lengths[a]);
  }

  out.shifted = fourier_shift(w, out.shift);
  return out;
}

ThicknessProfile measure_thickness(const Field& u, const Field& v, const Ray& ray, double level) {
  require_same_grid(u, v);
  const auto& g = u.grid;
  double dn = 0.0;
  for (int a = 0; a < g.dim; ++a) dn += ray.direction[a] * ray.direction[a];
  dn = std::sqrt(dn);
  if (!(dn > 0.0) || !(ray.length > 0.0) || !std::isfinite(ray.length))
    throw Error(Errc::invalid_argument, "ray needs a nonzero direction and positive length");
  double h = g.spacing(0);
  for (int a = 1; a < g.dim; ++a) h = std::min(h, g.spacing(a));
  const double ds = h / 8.0;
  const auto steps = static_cast<std::size_t>(std::ceil(ray.length / ds));

  Field uv(g);
  for (std::size_t i = 0; i < u.size(); ++i) uv[i] = u[i] + v[i];

  ThicknessProfile out;
  auto at = [&](double s) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) x[a] = ray.origin[a] + s * ray.direction[a] / dn;
    return x;
  };
  for (const Field* f : {&u, static_cast<const Field*>(&uv)}) {
    double s0 = 0.0, f0 = sample(*f, at(0.0)) - level;
    for (std::size_t i = 1; i <= steps; ++i) {
      const double s1 = std::min(ray.length, i * ds);
      const double f1 = sample(*f, at(s1)) - level;
      if ((f0 < 0.0) != (f1 < 0.0)) out.crossings.push_back(s0 + (s1 - s0) * f0 / (f0 - f1));
      s0 = s1;
      f0 = f1;
    }
  }
  if (out.crossings.empty()) throw Error(Errc::degenerate, "measure_thickness: no level crossings along the ray");
  std::sort(out.crossings.begin(), out.crossings.end());
  for (std::size_t i = 1; i < out.crossings.size(); ++i)
    out.intervals.push_back(out.crossings[i] - out.crossings[i - 1]);
  return out;
}

}  // namespace okpf
