#include "okpf/initcond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "okpf/error.hpp"

namespace okpf {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Vec3 node(const GridSpec& g, int i, int j, int k) {
  return {i * g.spacing(0), j * g.spacing(1), g.dim == 3 ? k * g.spacing(2) : 0.0};
}

// minimum-image displacement x - c
Vec3 disp(const GridSpec& g, const Vec3& x, const Vec3& c) {
  Vec3 d{};
  for (int a = 0; a < g.dim; ++a) {
    const double L = g.lengths[a];
    d[a] = x[a] - c[a];
    d[a] -= L * std::round(d[a] / L);
  }
  return d;
}

double norm(const Vec3& d) { return std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]); }

// distance from (px, py) to the ellipse x²/A² + y²/B² = 1
double ellipse_distance(double A, double B, double px, double py) {
  if (A == B) return std::abs(std::hypot(px, py) - A);
  double best = std::numeric_limits<double>::infinity(), th = 0.0;
  for (int s = 0; s < 16; ++s) {
    const double t = two_pi * s / 16.0;
    const double d = std::hypot(A * std::cos(t) - px, B * std::sin(t) - py);
    if (d < best) {
      best = d;
      th = t;
    }
  }
  for (int it = 0; it < 12; ++it) {
    const double c = std::cos(th), s = std::sin(th);
    const double f = (A * A - B * B) * s * c - px * A * s + py * B * c;
    const double fp = (A * A - B * B) * (c * c - s * s) - px * A * c - py * B * s;
    if (fp == 0.0) break;
    th -= f / fp;
  }
  return std::min(best, std::hypot(A * std::cos(th) - px, B * std::sin(th) - py));
}

double segment_distance(const GridSpec& g, const Vec3& x, const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
  const Vec3 d = disp(g, x, {a[0], a[1], 0.0});
  const double ex = b[0] - a[0], ey = b[1] - a[1];
  const double len2 = ex * ex + ey * ey;
  double t = len2 > 0.0 ? (d[0] * ex + d[1] * ey) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(d[0] - t * ex, d[1] - t * ey);
}

struct Bands {
  double u_signed;  // >0 inside U
  double v_signed;  // >0 inside the flanking V bands
};

Bands bands_from_midsurface(double delta, double h, double t) {
  return {h - delta, std::min(delta - h, h + t - delta)};
}

}  // namespace

double tanh_profile(double signed_distance, double epsilon) {
  return 0.5 * (1.0 + std::tanh(3.0 * signed_distance / epsilon));
}

FieldPair build_bilayer(const BilayerSpec& spec, const GridSpec& grid, double zeta) {
  grid.validate();
  if (!(spec.u_half_thickness > 0.0) || !(spec.epsilon > 0.0))
    throw Error(Errc::invalid_argument, "half thickness and epsilon must be positive");
  const double h = spec.u_half_thickness;
  const double t = spec.v_thickness.value_or(zeta * h);
  if (!(t > 0.0)) throw Error(Errc::invalid_argument, "v thickness must be positive");

  if (std::holds_alternative<shape::Torus>(spec.shape) && grid.dim != 3)
    throw Error(Errc::invalid_argument, "torus seeds need a 3-D grid");
  if (std::holds_alternative<shape::Gyroid>(spec.shape) && grid.dim != 3)
    throw Error(Errc::invalid_argument, "gyroid seeds need a 3-D grid");
  if (std::holds_alternative<shape::Curve>(spec.shape)) {
    if (grid.dim != 2) throw Error(Errc::invalid_argument, "curve seeds need a 2-D grid");
    if (std::get<shape::Curve>(spec.shape).points.size() < 3)
      throw Error(Errc::invalid_argument, "curve needs at least 3 points");
  }

  auto bands = [&](const Vec3& x) -> Bands {
    return std::visit(
        [&](const auto& s) -> Bands {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, shape::Ball>) {
            const double r = norm(disp(grid, x, s.center));
            return {s.radius - r, std::min(r - s.radius, s.radius + t - r)};
          } else if constexpr (std::is_same_v<S, shape::Shell>) {
            const double r = norm(disp(grid, x, s.center));
            const double mid = 0.5 * (s.inner_radius + s.outer_radius);
            const double hh = 0.5 * (s.outer_radius - s.inner_radius);
            return bands_from_midsurface(std::abs(r - mid), hh, t);
          } else if constexpr (std::is_same_v<S, shape::Disk>) {
            const Vec3 d = disp(grid, x, s.center);
            Vec3 nn = s.normal;
            if (grid.dim == 2) nn[2] = 0.0;
            const double nl = norm(nn);
            for (auto& c : nn) c /= nl;
            const double a = d[0] * nn[0] + d[1] * nn[1] + d[2] * nn[2];
            const Vec3 p{d[0] - a * nn[0], d[1] - a * nn[1], d[2] - a * nn[2]};
            const double rho = norm(p);
            double delta = std::abs(a);
            if (s.radius > 0.0 && std::isfinite(s.radius) && rho > s.radius)
              delta = std::hypot(a, rho - s.radius);
            return bands_from_midsurface(delta, h, t);
          } else if constexpr (std::is_same_v<S, shape::Torus>) {
            const Vec3 d = disp(grid, x, s.center);
            const double dp = ellipse_distance(s.major_radius * s.deform, s.major_radius, d[0], d[1]);
            const double tube = std::hypot(dp, d[2]);
            return bands_from_midsurface(std::abs(tube - s.minor_radius), h, t);
          } else if constexpr (std::is_same_v<S, shape::Gyroid>) {
            const double k = two_pi / s.scale;
            const double X = k * x[0], Y = k * x[1], Z = k * x[2];
            const double G = std::sin(X) * std::cos(Y) + std::sin(Y) * std::cos(Z) +
                             std::sin(Z) * std::cos(X) - s.level;
            const double gx = std::cos(X) * std::cos(Y) - std::sin(Z) * std::sin(X);
            const double gy = -std::sin(X) * std::sin(Y) + std::cos(Y) * std::cos(Z);
            const double gz = -std::sin(Y) * std::sin(Z) + std::cos(Z) * std::cos(X);
            const double grad = k * std::max(std::sqrt(gx * gx + gy * gy + gz * gz), 1e-3);
            return bands_from_midsurface(std::abs(G) / grad, h, t);
          } else {
            double delta = std::numeric_limits<double>::infinity();
            const auto& pts = s.points;
            for (std::size_t i = 0; i < pts.size(); ++i)
              delta = std::min(delta, segment_distance(grid, x, pts[i], pts[(i + 1) % pts.size()]));
            return bands_from_midsurface(delta, h, t);
          }
        },
        spec.shape);
  };

  FieldPair out{Field(grid), Field(grid)};
  const int nz = grid.dim == 3 ? grid.points[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < grid.points[1]; ++j)
      for (int i = 0; i < grid.points[0]; ++i) {
        const Bands b = bands(node(grid, i, j, k));
        const double u = tanh_profile(b.u_signed, spec.epsilon);
        const double v = tanh_profile(b.v_signed, spec.epsilon);
        const std::size_t n = out.u.index(i, j, k);
        out.u[n] = u;
        out.v[n] = std::clamp(v, 0.0, 1.0 - u);
      }
  return out;
}

FieldPair build_radial(const radial::RadialCandidate& c, const Vec3& center, const GridSpec& grid,
                       double epsilon) {
  grid.validate();
  c.validate();
  if (c.n != grid.dim) throw Error(Errc::invalid_argument, "candidate dimension differs from grid");
  FieldPair out{Field(grid), Field(grid)};
  const bool micelle = c.kind() == radial::Kind::micelle;
  const int nz = grid.dim == 3 ? grid.points[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < grid.points[1]; ++j)
      for (int i = 0; i < grid.points[0]; ++i) {
        const double r = norm(disp(grid, node(grid, i, j, k), center));
        const double su = micelle ? c.r2 - r : std::min(r - c.r1, c.r2 - r);
        const double u = tanh_profile(su, epsilon);
        double v = tanh_profile(std::min(r - c.r2, c.r3 - r), epsilon);
        if (!micelle) v += tanh_profile(std::min(r - c.r0, c.r1 - r), epsilon);
        const std::size_t n = out.u.index(i, j, k);
        out.u[n] = u;
        out.v[n] = std::clamp(v, 0.0, 1.0 - u);
      }
  return out;
}

FieldPair perforate(const Field& u, const Field& v, const Vec3& hole_center, double hole_radius,
                    double epsilon) {
  require_same_grid(u, v);
  if (!(hole_radius >= 0.0)) throw Error(Errc::invalid_argument, "hole radius must be nonnegative");
  FieldPair out{u, v};
  if (hole_radius == 0.0) return out;
  const auto& g = u.grid;
  const int nz = g.dim == 3 ? g.points[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.points[1]; ++j)
      for (int i = 0; i < g.points[0]; ++i) {
        const double r = norm(disp(g, node(g, i, j, k), hole_center));
        const double s = tanh_profile(r - hole_radius, epsilon);
        const std::size_t n = u.index(i, j, k);
        out.u[n] *= s;
        out.v[n] *= s;
      }
  return out;
}

Field mass_rescale(const Field& f, double target_mass) {
  const double m = integrate(f);
  if (!(m > 0.0)) throw Error(Errc::degenerate, "mass_rescale: field has no positive mass");
  const double s = target_mass / m;
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::clamp(f[i] * s, 0.0, 1.1);
  return out;
}

std::vector<std::array<double, 2>> random_curve(const std::array<double, 2>& center, double base_radius,
                                                int harmonics, double amplitude, std::uint64_t seed,
                                                int samples) {
  if (samples < 3 || !(base_radius > 0.0)) throw Error(Errc::invalid_argument, "bad curve parameters");
  std::mt19937_64 rng(seed);
  std::vector<double> a(harmonics + 1), b(harmonics + 1);
  for (int k = 1; k <= harmonics; ++k) {
    std::uniform_real_distribution<double> dist(-amplitude / k, amplitude / k);
    a[k] = dist(rng);
    b[k] = dist(rng);
  }
  std::vector<std::array<double, 2>> pts(samples);
  for (int s = 0; s < samples; ++s) {
    const double th = two_pi * s / samples;
    double r = 1.0;
    for (int k = 1; k <= harmonics; ++k) r += a[k] * std::cos(k * th) + b[k] * std::sin(k * th);
    r *= base_radius;
    pts[s] = {center[0] + r * std::cos(th), center[1] + r * std::sin(th)};
  }
  return pts;
}

void add_noise(Field& f, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (auto& x : f.values) x += dist(rng);
}

}  // namespace okpf
