#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "okpf/error.hpp"
#include "okpf/grid.hpp"

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

// band-limited random field: a handful of low modes with random amplitudes
Field smooth_random(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  struct Mode {
    int a, b, c;
    double amp, phase;
  };
  std::vector<Mode> modes;
  for (int i = 0; i < 12; ++i) modes.push_back({int(rng() % 7) - 3, int(rng() % 7) - 3, int(rng() % 5) - 2, d(rng), 3.0 * d(rng)});
  return sample(g, [&](double x, double y, double z) {
    double s = 0.0;
    for (const auto& m : modes)
      s += m.amp * std::cos(2 * pi * (m.a * x / g.lengths[0] + m.b * y / g.lengths[1] +
                                      (g.dim == 3 ? m.c * z / g.lengths[2] : 0.0)) +
                            m.phase);
    return s;
  });
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double mean(const Field& f) { return integrate(f) / f.grid.volume(); }

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_NOTHROW(GridSpec::square(4, 1.0).validate());
  CHECK_THROWS_AS(GridSpec::square(6 + 1, 1.0).validate(), Error);
  CHECK_THROWS_AS(GridSpec::square(2, 1.0).validate(), Error);
  CHECK_THROWS_AS(GridSpec::square(8, 0.0).validate(), Error);
  const auto g = GridSpec::make(3, {8, 4, 6}, {1.0, 2.0, 3.0});
  CHECK(g.size() == 192);
  CHECK(g.cell_volume() == doctest::Approx(0.125 * 0.5 * 0.5));
  CHECK(g.volume() == doctest::Approx(6.0));
}

TEST_CASE("non-finite samples are rejected") {
  const auto g = GridSpec::square(8, 1.0);
  Field w(g);
  w[3] = std::nan("");
  CHECK_THROWS_AS(poisson_solve(w), Error);
  try {
    poisson_solve(w);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_field);
  }
}

TEST_CASE("poisson solve of a cosine") {
  const auto g = GridSpec::square(32, 1.0);
  const Field w = sample(g, [](double x, double, double) { return std::cos(2 * pi * x); });
  const Field phi = poisson_solve(w);
  const Field want = sample(g, [](double x, double, double) { return std::cos(2 * pi * x) / (4 * pi * pi); });
  CHECK(max_abs_diff(phi, want) < 1e-15);
}

TEST_CASE("poisson solve kills constants") {
  const auto g = GridSpec::square(16, 2.6);
  const Field phi = poisson_solve(Field(g, 3.5));
  for (double x : phi.values) CHECK(x == 0.0);
}

TEST_CASE("laplacian inverts poisson solve on band-limited data") {
  for (int dim : {2, 3}) {
    const auto g = dim == 2 ? GridSpec::make(2, {32, 16, 1}, {1.0, 2.0, 1.0}) : GridSpec::cube(16, 1.3);
    const Field w = smooth_random(g, 7 + dim);
    const Field phi = poisson_solve(w);
    const Field lap = laplacian(phi);
    const double mw = mean(w);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      err = std::max(err, std::abs(-lap[i] - (w[i] - mw)));
      scale = std::max(scale, std::abs(w[i]));
    }
    CHECK(err < 1e-12 * scale);
    double pmax = 0.0;
    for (double x : phi.values) pmax = std::max(pmax, std::abs(x));
    CHECK(std::abs(mean(phi)) < 1e-13 * pmax);
  }
}

TEST_CASE("laplacian of eigenfunction and constant") {
  const auto g = GridSpec::square(16, 1.0);
  const Field f = sample(g, [](double x, double, double) { return std::cos(2 * pi * x); });
  const Field lap = laplacian(f);
  const Field want = sample(g, [](double x, double, double) { return -4 * pi * pi * std::cos(2 * pi * x); });
  CHECK(max_abs_diff(lap, want) < 1e-12);
  const Field c = laplacian(Field(g, 2.0));
  for (double x : c.values) CHECK(std::abs(x) < 1e-14);
}

TEST_CASE("integrals") {
  CHECK(integrate(Field(GridSpec::square(16, 2.6), 1.0)) == doctest::Approx(6.76).epsilon(1e-14));
  const auto g = GridSpec::square(32, 1.0);
  const Field s = sample(g, [](double x, double, double) { return std::sin(2 * pi * x); });
  CHECK(std::abs(integrate(s)) < 1e-14);
}

TEST_CASE("dirichlet energy") {
  const auto g = GridSpec::square(32, 1.0);
  const Field f = sample(g, [](double x, double, double) { return std::cos(2 * pi * x); });
  CHECK(dirichlet_energy(f) == doctest::Approx(2 * pi * pi).epsilon(1e-13));
  CHECK(std::abs(dirichlet_energy(Field(g, 4.0))) < 1e-13);

  for (int dim : {2, 3}) {
    const auto h = dim == 2 ? GridSpec::square(32, 2.6) : GridSpec::make(3, {16, 8, 12}, {1.0, 0.7, 1.2});
    const Field r = smooth_random(h, 99 + dim);
    const Field lap = laplacian(r);
    double ibp = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) ibp -= r[i] * lap[i];
    ibp *= h.cell_volume();
    const double d = dirichlet_energy(r);
    CHECK(d >= 0.0);
    CHECK(std::abs(d - ibp) < 1e-10 * std::max(1.0, d));
  }
}

TEST_CASE("nyquist modes are counted once in the quadratic form") {
  const auto g = GridSpec::square(8, 1.0);
  // cos(π x / dx) alternates ±1 on the nodes; its spectral gradient energy is k_N^2 ∫ f^2
  const Field f = sample(g, [&](double x, double, double) { return std::cos(8 * pi * x); });
  const double kn = 8 * pi;
  CHECK(dirichlet_energy(f) == doctest::Approx(kn * kn * integrate(Field(g, 1.0))).epsilon(1e-13));
}

TEST_CASE("operators commute with circular shifts") {
  const auto g = GridSpec::make(3, {8, 12, 10}, {1.0, 1.5, 1.2});
  const Field w = smooth_random(g, 3);
  const std::array<int, 3> s{3, -5, 7};
  const Field a = circular_shift(poisson_solve(w), s);
  const Field b = poisson_solve(circular_shift(w, s));
  CHECK(max_abs_diff(a, b) < 1e-13);
  CHECK(dirichlet_energy(w) == doctest::Approx(dirichlet_energy(circular_shift(w, s))).epsilon(1e-13));
  const Field sh = circular_shift(w, {1, 0, 0});
  CHECK(sh.at(1, 0, 0) == w.at(0, 0, 0));
}
