#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "okpf/analysis.hpp"
#include "okpf/error.hpp"
#include "okpf/initcond.hpp"
#include "okpf/radial.hpp"

using namespace okpf;

namespace {

constexpr double pi = std::numbers::pi;

Field sample(const GridSpec& g, auto f) {
  Field out(g);
  const int nz = g.dim == 3 ? g.points[2] : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.points[1]; ++j)
      for (int i = 0; i < g.points[0]; ++i)
        out.at(i, j, k) = f(i * g.spacing(0), j * g.spacing(1), g.dim == 3 ? k * g.spacing(2) : 0.0);
  return out;
}

double abs_integral(const Field& w) {
  double s = 0.0;
  for (double x : w.values) s += std::abs(x);
  return s * w.grid.cell_volume();
}

}  // namespace

TEST_CASE("fit recovers its own model exactly") {
  std::vector<std::pair<double, double>> pts;
  for (double m = 0.4; m <= 1.2001; m += 0.1) pts.emplace_back(m, 15.0 + 2.0 * std::pow(m, -2.0));
  const auto f = fit_energy_mass(pts);
  CHECK(f.a == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(f.b == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(f.p == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(f.rms_residual < 1e-12);

  const auto fixed = fit_energy_mass(pts, 2.0);
  CHECK(fixed.a == doctest::Approx(15.0).epsilon(1e-13));
  CHECK(fixed.b == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(fixed.p == 2.0);
  CHECK(fixed.rms_residual < 1e-13);

  std::vector<std::pair<double, double>> half;
  for (double m : {1.0, 2.0, 4.0, 8.0, 16.0}) half.emplace_back(m, 9.0 - 0.5 / std::sqrt(m));
  const auto h = fit_energy_mass(half);
  CHECK(h.p == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(h.b == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("fit of the 3-D energy-to-mass point sets") {
  const auto lip = fit_energy_mass({{1, 10.694}, {1.6, 10.554}, {2.4, 10.477}, {7, 10.378}});
  CHECK(lip.p >= 0.8);
  CHECK(lip.p <= 1.3);
  CHECK(std::abs(lip.a - 10.4004) / 10.4004 < 0.015);
  const auto disk = fit_energy_mass({{1, 10.841}, {1.6, 10.733}, {2.4, 10.659}, {7, 10.521}});
  CHECK(disk.p >= 0.35);
  CHECK(disk.p <= 0.7);
  CHECK(std::abs(disk.a - 10.4004) / 10.4004 < 0.015);
}

TEST_CASE("fit input errors") {
  CHECK_THROWS_AS(fit_energy_mass({{1, 1}, {2, 2}}), Error);
  try {
    fit_energy_mass({{1, 1}, {1, 2}, {2, 3}});
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate);
  }
  CHECK_THROWS_AS(fit_energy_mass({{-1, 1}, {1, 2}, {2, 3}}), Error);
}

TEST_CASE("dipole of a sine shifts by a quarter period") {
  const auto g = GridSpec::square(64, 1.0);
  const Field w = sample(g, [](double x, double, double) { return std::sin(2 * pi * x); });
  // ∫(x - 1/2) sin(2πx) dx = -1/(2π)
  CHECK(dipole_moment(w)[0] == doctest::Approx(-1.0 / (2 * pi)).epsilon(1e-13));
  CHECK(std::abs(dipole_moment(w)[1]) < 1e-15);
  const auto r = zero_dipole_shift(w);
  const double t = r.shift[0];
  CHECK((std::abs(t - 0.25) < 1e-12 || std::abs(t - 0.75) < 1e-12));
  CHECK(r.flat[1]);
  const auto d = dipole_moment(r.shifted);
  CHECK(std::abs(d[0]) < 1e-12);
  CHECK(std::abs(d[1]) < 1e-12);
  // the shifted field is w(x + t)
  const Field want = sample(g, [&](double x, double, double) { return std::sin(2 * pi * (x + t)); });
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(r.shifted[i] - want[i]) < 1e-12);
}

TEST_CASE("even fields need no shift") {
  const auto g = GridSpec::square(32, 2.0);
  const Field w = sample(g, [](double x, double y, double) {
    return std::cos(pi * (x - 1.0)) * std::cos(pi * (y - 1.0)) + 0.3 * std::cos(2 * pi * (x - 1.0));
  });
  const auto r = zero_dipole_shift(w);
  CHECK(r.shift[0] == 0.0);
  CHECK(r.shift[1] == 0.0);
}

TEST_CASE("random zero-mean fields reach zero dipole") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = trial % 5 == 4 ? GridSpec::make(3, {16, 8, 12}, {1.0, 0.8, 1.2}) : GridSpec::make(2, {32, 24, 1}, {1.3, 1.0, 1.0});
    Field w(g);
    for (double& x : w.values) x = nd(rng);
    const double mean = integrate(w) / g.volume();
    for (double& x : w.values) x -= mean;
    const auto r = zero_dipole_shift(w);
    const auto d = dipole_moment(r.shifted);
    const double scale = abs_integral(w);
    for (int a = 0; a < g.dim; ++a) {
      CHECK(std::abs(d[a]) < 1e-8 * scale * g.lengths[a]);
      CHECK(r.shift[a] >= 0.0);
      CHECK(r.shift[a] < g.lengths[a]);
    }
  }
}

TEST_CASE("dipole shift rejects charged fields") {
  const auto g = GridSpec::square(16, 1.0);
  try {
    zero_dipole_shift(Field(g, 1.0));
    FAIL("expected invalid argument");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
  }
}

TEST_CASE("fourier shift is exact on band-limited data and whole cells") {
  const auto g = GridSpec::square(16, 1.0);
  const Field w = sample(g, [](double x, double y, double) { return std::sin(2 * pi * x) + std::cos(4 * pi * y + 0.3); });
  const double dx = g.spacing(0);
  const Field s = fourier_shift(w, {3 * dx, -2 * dx, 0.0});
  const Field c = circular_shift(w, {-3, 2, 0});
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(s[i] - c[i]) < 1e-14);
}

TEST_CASE("thickness along a ray through a radial shell") {
  const auto c = radial::optimize_liposome(1.0, 1.0, 1500.0, 2, false).candidate;
  const auto g = GridSpec::square(1024, 2.6);
  const auto fp = build_radial(c, {1.3, 1.3, 0.0}, g, 0.005);
  const Ray ray{{1.3, 1.3, 0.0}, {1.0, 0.0, 0.0}, 1.2};
  const auto t = measure_thickness(fp.u, fp.v, ray);
  REQUIRE(t.crossings.size() == 4);
  REQUIRE(t.intervals.size() == 3);
  const double dx = g.spacing(0);
  CHECK(std::abs(t.crossings[0] - c.r0) < dx);
  CHECK(std::abs(t.intervals[0] - (c.r1 - c.r0)) < dx);
  CHECK(std::abs(t.intervals[1] - (c.r2 - c.r1)) < dx);
  CHECK(std::abs(t.intervals[2] - (c.r3 - c.r2)) < dx);
  // inner V layer is thicker
  CHECK(t.intervals[0] > t.intervals[2]);

  // simultaneous shift of fields and ray origin
  const int s = 37;
  Ray shifted = ray;
  shifted.origin[0] += s * dx;
  const auto ts = measure_thickness(circular_shift(fp.u, {s, 0, 0}), circular_shift(fp.v, {s, 0, 0}), shifted);
  REQUIRE(ts.crossings.size() == t.crossings.size());
  for (std::size_t i = 0; i < t.crossings.size(); ++i) CHECK(std::abs(ts.crossings[i] - t.crossings[i]) < 1e-9);
}

TEST_CASE("flat slab has equal V layers") {
  const auto g = GridSpec::make(2, {1024, 4, 1}, {2.0, 0.5, 1.0});
  BilayerSpec spec;
  spec.shape = shape::Disk{{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 0.0};
  spec.epsilon = 0.01;
  const auto fp = build_bilayer(spec, g);
  const auto t = measure_thickness(fp.u, fp.v, Ray{{0.3, 0.1, 0.0}, {1.0, 0.0, 0.0}, 1.4});
  REQUIRE(t.intervals.size() == 3);
  CHECK(std::abs(t.intervals[0] - t.intervals[2]) < 1e-3);
  CHECK(t.intervals[1] == doctest::Approx(0.2).epsilon(0.01));
  try {
    measure_thickness(Field(g), Field(g), Ray{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1.0});
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate);
  }
  CHECK_THROWS_AS(measure_thickness(fp.u, fp.v, Ray{{}, {0.0, 0.0, 0.0}, 1.0}), Error);
}
