#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

using namespace okpf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("okpf_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << s;
}

RunState random_state(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.1, 1.1);
  RunState s{Field(g), Field(g)};
  for (double& x : s.u.values) x = d(rng);
  for (double& x : s.v.values) x = d(rng);
  s.time = 0.123456789;
  s.step = 987654321;
  return s;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  const auto dir = scratch("ckpt");
  for (const auto& g : {GridSpec::square(32, 2.6), GridSpec::make(3, {8, 6, 4}, {1.0, 0.75, 0.5})}) {
    const RunState s = random_state(g, 5);
    write_checkpoint(dir / "a.okpf", s);
    const RunState r = read_checkpoint(dir / "a.okpf");
    CHECK(r.u.grid == g);
    CHECK(std::memcmp(r.u.values.data(), s.u.values.data(), s.u.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(r.v.values.data(), s.v.values.data(), s.v.size() * sizeof(double)) == 0);
    CHECK(r.time == s.time);
    CHECK(r.step == s.step);
    const std::size_t header = 4 + 4 + 4 + g.dim * (4 + 8) + 8 + 8;
    CHECK(fs::file_size(dir / "a.okpf") == header + 2 * g.size() * 8);
  }
  const std::string bytes = slurp(dir / "a.okpf");
  CHECK(bytes.substr(0, 4) == "OKPF");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 3);
}

TEST_CASE("damaged checkpoints are rejected") {
  const auto dir = scratch("damaged");
  const auto g = GridSpec::square(16, 1.0);
  write_checkpoint(dir / "good.okpf", random_state(g, 1));
  const std::string good = slurp(dir / "good.okpf");

  spit(dir / "trunc.okpf", good.substr(0, good.size() - 3));
  try {
    read_checkpoint(dir / "trunc.okpf");
    FAIL("expected corrupt file");
  } catch (const CorruptFileError& e) {
    CHECK(e.code() == Errc::corrupt_file);
  }
  spit(dir / "header.okpf", good.substr(0, 10));
  CHECK(code_of([&] { read_checkpoint(dir / "header.okpf"); }) == Errc::corrupt_file);

  std::string magic = good;
  magic[0] = 'X';
  spit(dir / "magic.okpf", magic);
  try {
    read_checkpoint(dir / "magic.okpf");
    FAIL("expected corrupt file");
  } catch (const CorruptFileError& e) {
    CHECK(e.offset() == 0);
  }

  std::string v2 = good;
  v2[4] = 2;
  spit(dir / "v2.okpf", v2);
  CHECK(code_of([&] { read_checkpoint(dir / "v2.okpf"); }) == Errc::unsupported_version);

  std::string odd = good;
  odd[12] = 15;
  spit(dir / "odd.okpf", odd);
  CHECK(code_of([&] { read_checkpoint(dir / "odd.okpf"); }) == Errc::corrupt_file);

  spit(dir / "long.okpf", good + "xx");
  CHECK(code_of([&] { read_checkpoint(dir / "long.okpf"); }) == Errc::corrupt_file);
  CHECK(code_of([&] { read_checkpoint(dir / "missing.okpf"); }) == Errc::io);
}

TEST_CASE("trace rows") {
  const auto dir = scratch("trace");
  const auto p = dir / "trace.csv";
  TraceRow a;
  a.step = 0;
  a.energy.total = 15.0;
  a.energy.perimeter = 1.0 / 3.0;
  a.mass_u = 1.0;
  a.mass_v = 0.999;
  a.residual = std::numeric_limits<double>::infinity();
  TraceRow b = a;
  b.step = 100;
  b.time = 0.0125;
  b.energy.total = 14.9;
  b.residual = 2.5e-3;
  append_trace(p, a);
  append_trace(p, b);
  std::istringstream is(slurp(p));
  std::string line;
  int n = 0;
  std::getline(is, line);
  CHECK(line == trace_header);
  while (std::getline(is, line)) ++n;
  CHECK(n == 2);
  const auto rows = read_trace(p);
  REQUIRE(rows.size() == 2);
  CHECK(std::isinf(rows[0].residual));
  CHECK(rows[0].energy.perimeter == 1.0 / 3.0);
  CHECK(rows[1].step == 100);
  CHECK(rows[1].time == 0.0125);
  CHECK(rows[1].residual == 2.5e-3);

  const auto pts = read_points(p);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].first == 1.0);
  CHECK(pts[0].second == 14.9);

  spit(dir / "points.txt", "# m ratio\n1 10.694\n1.6, 10.554\n\n2.4\t10.477\n");
  const auto q = read_points(dir / "points.txt");
  REQUIRE(q.size() == 3);
  CHECK(q[1].first == 1.6);
  CHECK(q[2].second == 10.477);
  spit(dir / "bad.txt", "1 2\nfoo\n");
  CHECK(code_of([&] { read_points(dir / "bad.txt"); }) == Errc::corrupt_file);
}

TEST_CASE("config round trip") {
  RunConfig c;
  CHECK(config_from_json(to_json(c)) == c);

  RunConfig d;
  d.physics.zeta = 0.5;
  d.physics.gamma = 500.0;
  d.physics.mass = 7.0;
  d.physics.interp = Interpolant::identity;
  d.physics.v_reg = 0.0;
  d.stepper.stop_tol = std::numeric_limits<double>::infinity();
  d.stepper.max_steps = 0;
  d.grid = GridSpec::make(3, {48, 48, 64}, {2.0, 2.0, 2.6});
  BilayerSpec b;
  b.shape = shape::Torus{{1.0, 1.0, 1.3}, 0.6, 0.2, 1.4};
  b.v_thickness = 0.07;
  b.epsilon = 0.03;
  d.init = b;
  d.perturb = NoisePerturb{0.02, 42};
  d.rescale_mass = false;
  d.output_dir = "runs/torus";
  const std::string text = to_json(d);
  CHECK(config_from_json(text) == d);
  CHECK(to_json(config_from_json(text)) == text);

  for (const ShapeSpec& s : {ShapeSpec{shape::Ball{{1, 1, 0}, 0.3}}, ShapeSpec{shape::Shell{{1, 1, 0}, 0.3, 0.5}},
                             ShapeSpec{shape::Disk{{1, 1, 0}, {0, 1, 0}, INFINITY}}, ShapeSpec{shape::Disk{{1, 1, 0}, {0, 1, 0}, 0.4}},
                             ShapeSpec{shape::Gyroid{0.1, 1.3}}, ShapeSpec{shape::Curve{{{0, 0}, {1, 0}, {0.5, 1}}}}}) {
    RunConfig e;
    BilayerSpec bs;
    bs.shape = s;
    e.init = bs;
    e.perturb = HolePerturb{{1.0, 1.2, 0.0}, 0.1};
    CHECK(config_from_json(to_json(e)) == e);
  }
  RunConfig r;
  r.init = RadialInit{{1.3, 1.3, 0.0}, 0.27, 0.39, 0.58, 0.68};
  CHECK(config_from_json(to_json(r)) == r);
  RunConfig k;
  k.init = CheckpointInit{"out/final.okpf"};
  CHECK(config_from_json(to_json(k)) == k);

  const auto dir = scratch("config");
  save_config(dir / "c.json", d);
  CHECK(load_config(dir / "c.json") == d);
}

TEST_CASE("config defaults and errors") {
  const RunConfig c = config_from_json(R"({"physics": {"epsilon": 0.1}})");
  CHECK(c.physics.epsilon == 0.1);
  CHECK(c.physics.v_reg == PhysParams::default_v_reg(0.1));
  CHECK(c.physics.gamma == 1500.0);
  CHECK(c.grid == GridSpec::square(256, 2.6));
  CHECK(code_of([] { config_from_json(R"({"physics": {"zetta": 1}})"); }) == Errc::invalid_argument);
  CHECK(code_of([] { config_from_json(R"({"bogus": 1})"); }) == Errc::invalid_argument);
  CHECK(code_of([] { config_from_json(R"({"init": {"type": "bilayer", "shape": {"type": "cube"}}})"); }) == Errc::invalid_argument);
  CHECK(code_of([] { config_from_json(R"({"grid": {"dim": 2, "points": [7, 8], "lengths": [1, 1]}})"); }) == Errc::invalid_argument);
  CHECK(code_of([] { config_from_json("{not json"); }) == Errc::invalid_argument);
  CHECK(code_of([] { load_config("/nonexistent/config.json"); }) == Errc::io);
}

TEST_CASE("phase colors") {
  CHECK(phase_color(1, 0) == Rgb{211, 95, 183});
  CHECK(phase_color(0, 1) == Rgb{220, 220, 98});
  CHECK(phase_color(0, 0) == Rgb{255, 255, 255});
  // overlap truncates instead of wrapping
  CHECK(phase_color(1, 1) == Rgb{176, 60, 26});
  CHECK(phase_color(4, 4) == Rgb{0, 0, 0});
  CHECK(phase_color(-1, 0) == Rgb{255, 255, 255});
}

TEST_CASE("cross sections") {
  const auto g = GridSpec::make(3, {4, 6, 8}, {1.0, 1.0, 1.0});
  Field u(g), v(g);
  u.at(1, 5, 2) = 1.0;
  v.at(3, 0, 7) = 1.0;
  int w = 0, h = 0;
  const auto px = cross_section_pixels(u, v, Plane{2, 2}, &w, &h);
  CHECK(w == 4);
  CHECK(h == 6);
  // top row is y = 5
  CHECK(px[1] == Rgb{211, 95, 183});
  const auto py = cross_section_pixels(u, v, Plane{1, 0}, &w, &h);
  CHECK(w == 4);
  CHECK(h == 8);
  CHECK(py[3] == Rgb{220, 220, 98});
  CHECK(code_of([&] { cross_section_pixels(u, v, Plane{2, 8}, nullptr, nullptr); }) == Errc::out_of_range);
  CHECK(code_of([&] { cross_section_pixels(u, v, Plane{3, 0}, nullptr, nullptr); }) == Errc::out_of_range);

  const auto dir = scratch("render");
  render_cross_section(u, v, Plane{2, 2}, dir / "a.png");
  render_cross_section(u, v, Plane{2, 2}, dir / "b.png");
  const std::string a = slurp(dir / "a.png");
  CHECK(a.substr(1, 3) == "PNG");
  CHECK(a == slurp(dir / "b.png"));
  const Field one(GridSpec::square(8, 1.0), 1.0), zero(GridSpec::square(8, 1.0));
  for (const Rgb& c : cross_section_pixels(one, zero, Plane{}, nullptr, nullptr)) CHECK(c == Rgb{211, 95, 183});
  CHECK(code_of([&] { render_cross_section(one, zero, Plane{}, "/nonexistent/dir/x.png"); }) == Errc::io);
}

TEST_CASE("run from a config with no steps") {
  const auto dir = scratch("run0");
  RunConfig c;
  c.grid = GridSpec::square(32, 2.6);
  BilayerSpec b;
  b.shape = shape::Shell{{1.3, 1.3, 0.0}, 0.45, 0.72};
  c.init = b;
  c.stepper.max_steps = 0;
  c.output_dir = (dir / "out").string();
  int rows = 0;
  const auto r = run_config(c, [&](const TraceRow& row) {
    ++rows;
    CHECK(row.step == 0);
  });
  CHECK(rows == 1);
  CHECK(r.state.step == 0);
  CHECK(read_trace(dir / "out" / "trace.csv").size() == 1);
  CHECK(fs::exists(dir / "out" / "ckpt_00000000.okpf"));
  CHECK(fs::exists(dir / "out" / "final.okpf"));
  // rescaled seed carries the target mass in the plain integral unless the clamp bites
  CHECK(*std::max_element(r.state.u.values.begin(), r.state.u.values.end()) < 1.1);
  CHECK(integrate(r.state.u) == doctest::Approx(c.physics.mass).epsilon(1e-12));
  CHECK(integrate(r.state.v) <= c.physics.zeta * c.physics.mass * (1 + 1e-12));

  // restart from the checkpoint, unscaled
  RunConfig k = c;
  k.init = CheckpointInit{(dir / "out" / "final.okpf").string()};
  k.output_dir = (dir / "out2").string();
  const RunState s = initial_state(k);
  CHECK(s.u.values == r.state.u.values);
  k.grid = GridSpec::square(16, 2.6);
  CHECK(code_of([&] { initial_state(k); }) == Errc::grid_mismatch);
}

TEST_CASE("a short run writes a consistent trace") {
  const auto dir = scratch("run");
  RunConfig c;
  c.grid = GridSpec::square(32, 2.6);
  BilayerSpec b;
  b.shape = shape::Shell{{1.3, 1.3, 0.0}, 0.45, 0.72};
  c.init = b;
  c.perturb = NoisePerturb{};
  c.stepper.max_steps = 25;
  c.stepper.trace_every = 10;
  c.stepper.checkpoint_every = 20;
  c.output_dir = (dir / "out").string();
  const auto r = run_config(c);
  const auto rows = read_trace(dir / "out" / "trace.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[3].step == 25);
  CHECK(rows[3].energy.total == doctest::Approx(r.state.last_energy.total).epsilon(1e-15));
  CHECK(fs::exists(dir / "out" / "ckpt_00000020.okpf"));
  CHECK(fs::exists(dir / "out" / "ckpt_00000025.okpf"));
  const RunState fin = read_checkpoint(dir / "out" / "final.okpf");
  CHECK(fin.u.values == r.state.u.values);
  CHECK(rows[3].mass_u == doctest::Approx(integrate(apply_interpolant(fin.u, c.physics.interp))).epsilon(1e-14));
}
