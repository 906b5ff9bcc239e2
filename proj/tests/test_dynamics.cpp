#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "okpf/dynamics.hpp"
#include "okpf/error.hpp"
#include "okpf/initcond.hpp"
#include "okpf/radial.hpp"

using namespace okpf;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PhysParams coarse_params() {
  PhysParams p;
  p.gamma = 200.0;
  p.mass = 0.25;
  p.epsilon = 0.08;
  p.K1 = 2000.0;
  p.K2 = 500.0;
  p.v_reg = PhysParams::default_v_reg(p.epsilon);
  return p;
}

RunState liposome_seed(const GridSpec& g, const PhysParams& p) {
  BilayerSpec spec;
  spec.shape = shape::Shell{{g.lengths[0] / 2, g.lengths[1] / 2, 0.0}, 0.25, 0.45};
  spec.epsilon = p.epsilon;
  const auto fp = build_bilayer(spec, g, p.zeta);
  return RunState{fp.u, fp.v};
}

}  // namespace

TEST_CASE("split pieces add up to the well") {
  for (int i = -6; i <= 26; ++i)
    for (int j = -6; j <= 26; ++j) {
      const double u = i / 20.0, v = j / 20.0;
      const auto [w1, w2] = split_W(u, v);
      CHECK(w1 == doctest::Approx(87 * u * u / 2 + 27 * u * v + 27 * v * v).epsilon(1e-15));
      CHECK(std::abs(w1 + w2 - potential_W(u, v)) < 1e-13);
    }
  const double a = SplitConstants::a_uu, b = SplitConstants::a_uv, c = SplitConstants::a_vv;
  CHECK(a * c - b * b == 3969.0);
  const double disc = std::sqrt((a - c) * (a - c) + 4 * b * b);
  CHECK((a + c - disc) / 2 > 0.0);
}

TEST_CASE("concave remainder on the stabilized window") {
  // Hessian of W2 by central differences, sampled away from the kinks of W
  const double h = 1e-4;
  auto w2 = [](double u, double v) { return split_W(u, v).second; };
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 48; ++i)
    for (int j = 0; j <= 48; ++j) {
      const double u = -0.1 + 1.2 * (i + 0.37) / 49, v = -0.1 + 1.2 * (j + 0.61) / 49;
      const double uu = (w2(u + h, v) - 2 * w2(u, v) + w2(u - h, v)) / (h * h);
      const double vv = (w2(u, v + h) - 2 * w2(u, v) + w2(u, v - h)) / (h * h);
      const double uv = (w2(u + h, v + h) - w2(u + h, v - h) - w2(u - h, v + h) + w2(u - h, v - h)) / (4 * h * h);
      const double top = 0.5 * (uu + vv) + std::sqrt(0.25 * (uu - vv) * (uu - vv) + uv * uv);
      worst = std::max(worst, top);
    }
  // finite-difference noise is ~1e-6 at this step
  CHECK(worst <= 1e-5);
}

TEST_CASE("linear amplification lies in (0, 1]") {
  const PhysParams p;
  for (double dt : {1e-8, 1e-4, 1.0, 1e6})
    for (double k2 : {0.0, 1.0, 1e3, 1e8}) {
      StepperConfig cfg;
      cfg.dt = dt;
      const auto [au, av] = linear_amplification(k2, p, cfg);
      CHECK(au > 0.0);
      CHECK(au <= 1.0);
      CHECK(av > 0.0);
      CHECK(av <= 1.0);
    }
}

TEST_CASE("critical points are fixed") {
  const auto g = GridSpec::square(16, 1.0);
  PhysParams p;
  p.mass = 0.2;
  StepperConfig cfg;
  SUBCASE("water with a matched V background") {
    // u = 0, v = c with f(c) = ζm / |box|; every derivative vanishes
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (interpolant(mid) < p.zeta * p.mass ? lo : hi) = mid;
    }
    const RunState s{Field(g), Field(g, 0.5 * (lo + hi))};
    double res = 0.0;
    const RunState t = step(s, p, cfg, &res);
    CHECK(max_abs_diff(t.u, s.u) < 1e-13);
    CHECK(max_abs_diff(t.v, s.v) < 1e-13);
    CHECK(res < 1e-8);
    CHECK(t.step == 1);
    CHECK(t.time == cfg.dt);
  }
  SUBCASE("pure U") {
    const RunState s{Field(g, 1.0), Field(g)};
    const RunState t = step(s, p, cfg);
    CHECK(max_abs_diff(t.u, s.u) < 1e-13);
    CHECK(max_abs_diff(t.v, s.v) < 1e-13);
  }
}

TEST_CASE("small steps follow the gradient flow to first order") {
  const auto g = GridSpec::square(16, 1.0);
  const PhysParams p = coarse_params();
  const RunState s = liposome_seed(g, p);
  const auto d = variational_derivatives(s.u, s.v, p);
  std::vector<double> errs;
  for (double dt : {1e-6, 5e-7, 2.5e-7}) {
    StepperConfig cfg;
    cfg.dt = dt;
    const RunState t = step(s, p, cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      e = std::max(e, std::abs((t.u[i] - s.u[i]) / dt + cfg.L1 * d.du[i]));
      e = std::max(e, std::abs((t.v[i] - s.v[i]) / dt + cfg.L2 * d.dv[i]));
    }
    errs.push_back(e);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("run control") {
  const auto g = GridSpec::square(16, 1.0);
  SUBCASE("infinite tolerance runs exactly max_steps") {
    const PhysParams p = coarse_params();
    StepperConfig cfg;
    cfg.max_steps = 7;
    cfg.stop_tol = std::numeric_limits<double>::infinity();
    cfg.trace_every = 3;
    std::vector<std::uint64_t> traced;
    RunCallbacks cb;
    cb.on_trace = [&](const RunState& s, double) { traced.push_back(s.step); };
    const auto r = run(liposome_seed(g, p), p, cfg, cb);
    CHECK(r.state.step == 7);
    CHECK(r.reason == Termination::max_steps);
    CHECK(traced == std::vector<std::uint64_t>{0, 3, 6, 7});
    CHECK(r.state.time == doctest::Approx(7 * cfg.dt));
  }
  SUBCASE("zero data is already stationary") {
    // f'(0) = 0 switches the penalty forces off
    const auto r = run(RunState{Field(g), Field(g)}, PhysParams{}, StepperConfig{});
    CHECK(r.reason == Termination::converged);
    CHECK(r.state.step == 1);
    CHECK(r.residual == 0.0);
  }
  SUBCASE("zero max_steps reports the seed once") {
    StepperConfig cfg;
    cfg.max_steps = 0;
    int traces = 0, saves = 0;
    RunCallbacks cb;
    cb.on_trace = [&](const RunState&, double res) {
      ++traces;
      CHECK(std::isinf(res));
    };
    cb.on_checkpoint = [&](const RunState&) { ++saves; };
    const auto r = run(RunState{Field(g), Field(g)}, PhysParams{}, cfg, cb);
    CHECK(r.state.step == 0);
    CHECK(traces == 1);
    CHECK(saves == 1);
  }
}

TEST_CASE("divergence names the step") {
  const auto g = GridSpec::square(16, 1.0);
  PhysParams p;
  StepperConfig cfg;
  cfg.dt = 1e3;
  cfg.max_steps = 200;
  cfg.stop_tol = std::numeric_limits<double>::infinity();
  // far outside the stabilized window the explicit cubic terms blow up
  Field u(g, 40.0);
  u[5] = -40.0;
  try {
    run(RunState{u, Field(g, -30.0)}, p, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.code() == Errc::divergence);
    CHECK(e.step() >= 1);
  }
}

TEST_CASE("coarse relaxation decreases the energy") {
  const auto g = GridSpec::square(32, 1.0);
  const PhysParams p = coarse_params();
  StepperConfig cfg;
  cfg.dt = 1e-4;
  cfg.max_steps = 600;
  cfg.stop_tol = std::numeric_limits<double>::infinity();
  cfg.trace_every = 1;
  std::vector<double> energies;
  RunCallbacks cb;
  cb.on_trace = [&](const RunState& s, double) { energies.push_back(s.last_energy.total); };
  RunState s0 = liposome_seed(g, p);
  s0.u = mass_rescale(s0.u, p.mass);
  s0.v = mass_rescale(s0.v, p.zeta * p.mass);
  const auto r = run(s0, p, cfg, cb);
  REQUIRE(energies.size() == 601);
  int rises = 0;
  for (std::size_t i = 11; i < energies.size(); ++i)
    if (energies[i] > energies[i - 1] * (1 + 1e-8)) ++rises;
  CHECK(rises == 0);
  CHECK(energies.back() < energies.front());
  for (double x : r.state.u.values) CHECK(std::isfinite(x));
}

TEST_CASE("screening diagnostics") {
  const auto g = GridSpec::square(128, 2.0);
  const PhysParams p;
  CHECK_FALSE(screening_check(Field(g), Field(g), p).has_value());

  // the stationary sharp liposome has φ = 0 both in the core and outside
  const auto c = radial::optimize_liposome(0.6, 1.0, 1500.0, 2, false).candidate;
  CHECK(std::abs(radial::radial_potential(c, 0.0)) < 1e-12);
  const auto fp = build_radial(c, {1.0, 1.0, 0.0}, g, 0.01);
  const auto balanced = screening_check(fp.u, fp.v, p);
  REQUIRE(balanced.has_value());
  CHECK(*balanced < 0.05);

  // dropping the outer V layer leaves a net charge and a long-range potential
  Field v = fp.v;
  for (int j = 0; j < g.points[1]; ++j)
    for (int i = 0; i < g.points[0]; ++i) {
      const double x = i * g.spacing(0) - 1.0, y = j * g.spacing(1) - 1.0;
      if (std::hypot(x, y) > 0.5 * (c.r2 + c.r3)) v.at(i, j) = 0.0;
    }
  const auto charged = screening_check(fp.u, v, p);
  REQUIRE(charged.has_value());
  CHECK(*charged > 0.2);
}
