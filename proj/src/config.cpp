#include <fstream>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

namespace okpf {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::invalid_argument, "config: " + what); }

void only_keys(const json& j, const std::string& section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(section + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items())
    if (!ok.count(k)) bad("unknown key '" + k + "' in " + section);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("bad value for '") + key + "'");
  }
}

json vec(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 read_vec(const json& j, const char* key) {
  Vec3 v{0.0, 0.0, 0.0};
  if (!j.contains(key)) return v;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() < 2 || a.size() > 3) bad(std::string("'") + key + "' must have 2 or 3 entries");
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json shape_json(const ShapeSpec& s) {
  return std::visit(
      [](const auto& x) -> json {
        using S = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<S, shape::Ball>) {
          return {{"type", "ball"}, {"center", vec(x.center)}, {"radius", x.radius}};
        } else if constexpr (std::is_same_v<S, shape::Shell>) {
          return {{"type", "shell"},
                  {"center", vec(x.center)},
                  {"inner_radius", x.inner_radius},
                  {"outer_radius", x.outer_radius}};
        } else if constexpr (std::is_same_v<S, shape::Disk>) {
          json r = {{"type", "disk"}, {"center", vec(x.center)}, {"normal", vec(x.normal)}};
          r["radius"] = std::isfinite(x.radius) ? json(x.radius) : json(nullptr);
          return r;
        } else if constexpr (std::is_same_v<S, shape::Torus>) {
          return {{"type", "torus"},
                  {"center", vec(x.center)},
                  {"major_radius", x.major_radius},
                  {"minor_radius", x.minor_radius},
                  {"deform", x.deform}};
        } else if constexpr (std::is_same_v<S, shape::Gyroid>) {
          return {{"type", "gyroid"}, {"level", x.level}, {"scale", x.scale}};
        } else {
          json pts = json::array();
          for (const auto& p : x.points) pts.push_back({p[0], p[1]});
          return {{"type", "curve"}, {"points", pts}};
        }
      },
      s);
}

ShapeSpec shape_from(const json& j) {
  if (!j.is_object() || !j.contains("type")) bad("shape needs a 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "ball") {
    only_keys(j, "ball", {"type", "center", "radius"});
    shape::Ball b;
    b.center = read_vec(j, "center");
    read(j, "radius", b.radius);
    return b;
  }
  if (type == "shell") {
    only_keys(j, "shell", {"type", "center", "inner_radius", "outer_radius"});
    shape::Shell s;
    s.center = read_vec(j, "center");
    read(j, "inner_radius", s.inner_radius);
    read(j, "outer_radius", s.outer_radius);
    return s;
  }
  if (type == "disk") {
    only_keys(j, "disk", {"type", "center", "normal", "radius"});
    shape::Disk d;
    d.center = read_vec(j, "center");
    if (j.contains("normal")) d.normal = read_vec(j, "normal");
    if (j.contains("radius"))
      d.radius = j.at("radius").is_null() ? std::numeric_limits<double>::infinity() : j.at("radius").get<double>();
    return d;
  }
  if (type == "torus") {
    only_keys(j, "torus", {"type", "center", "major_radius", "minor_radius", "deform"});
    shape::Torus t;
    t.center = read_vec(j, "center");
    read(j, "major_radius", t.major_radius);
    read(j, "minor_radius", t.minor_radius);
    read(j, "deform", t.deform);
    return t;
  }
  if (type == "gyroid") {
    only_keys(j, "gyroid", {"type", "level", "scale"});
    shape::Gyroid g;
    read(j, "level", g.level);
    read(j, "scale", g.scale);
    return g;
  }
  if (type == "curve") {
    only_keys(j, "curve", {"type", "points"});
    shape::Curve c;
    read(j, "points", c.points);
    return c;
  }
  bad("unknown shape type '" + type + "'");
}

}  // namespace

void RunConfig::validate() const {
  physics.validate();
  stepper.validate();
  grid.validate();
  if (const auto* h = std::get_if<HolePerturb>(&perturb); h && !(h->radius >= 0.0))
    bad("hole radius must be nonnegative");
  if (const auto* n = std::get_if<NoisePerturb>(&perturb); n && !(n->amplitude >= 0.0))
    bad("noise amplitude must be nonnegative");
  if (output_dir.empty()) bad("output_dir must not be empty");
}

std::string to_json(const RunConfig& c) {
  json j;
  const auto& p = c.physics;
  j["physics"] = {{"zeta", p.zeta},
                  {"gamma", p.gamma},
                  {"mass", p.mass},
                  {"epsilon", p.epsilon},
                  {"K1", p.K1},
                  {"K2", p.K2},
                  {"v_reg", p.v_reg},
                  {"interpolant", p.interp == Interpolant::cubic ? "cubic" : "identity"}};
  const auto& s = c.stepper;
  j["stepper"] = {{"L1", s.L1},
                  {"L2", s.L2},
                  {"dt", s.dt},
                  {"max_steps", s.max_steps},
                  {"stop_tol", std::isfinite(s.stop_tol) ? json(s.stop_tol) : json(nullptr)},
                  {"checkpoint_every", s.checkpoint_every},
                  {"trace_every", s.trace_every}};
  json pts = json::array(), lens = json::array();
  for (int a = 0; a < c.grid.dim; ++a) {
    pts.push_back(c.grid.points[a]);
    lens.push_back(c.grid.lengths[a]);
  }
  j["grid"] = {{"dim", c.grid.dim}, {"points", pts}, {"lengths", lens}};
  j["init"] = std::visit(
      [](const auto& x) -> json {
        using S = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<S, BilayerSpec>) {
          json b = {{"type", "bilayer"},
                    {"shape", shape_json(x.shape)},
                    {"u_half_thickness", x.u_half_thickness},
                    {"epsilon", x.epsilon}};
          if (x.v_thickness) b["v_thickness"] = *x.v_thickness;
          return b;
        } else if constexpr (std::is_same_v<S, RadialInit>) {
          return {{"type", "radial"}, {"center", vec(x.center)}, {"radii", {x.r0, x.r1, x.r2, x.r3}}};
        } else {
          return {{"type", "checkpoint"}, {"path", x.path}};
        }
      },
      c.init);
  j["rescale_mass"] = c.rescale_mass;
  j["perturb"] = std::visit(
      [](const auto& x) -> json {
        using S = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<S, NoisePerturb>) {
          return {{"type", "noise"}, {"amplitude", x.amplitude}, {"seed", x.seed}};
        } else if constexpr (std::is_same_v<S, HolePerturb>) {
          return {{"type", "hole"}, {"center", vec(x.center)}, {"radius", x.radius}};
        } else {
          return nullptr;
        }
      },
      c.perturb);
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("parse error: ") + e.what());
  }
  only_keys(j, "top level", {"physics", "stepper", "grid", "init", "rescale_mass", "perturb", "output_dir"});
  RunConfig c;

  if (j.contains("physics")) {
    const auto& p = j.at("physics");
    only_keys(p, "physics", {"zeta", "gamma", "mass", "epsilon", "K1", "K2", "v_reg", "interpolant"});
    read(p, "zeta", c.physics.zeta);
    read(p, "gamma", c.physics.gamma);
    read(p, "mass", c.physics.mass);
    read(p, "epsilon", c.physics.epsilon);
    read(p, "K1", c.physics.K1);
    read(p, "K2", c.physics.K2);
    c.physics.v_reg = PhysParams::default_v_reg(c.physics.epsilon);
    read(p, "v_reg", c.physics.v_reg);
    if (p.contains("interpolant")) {
      const auto k = p.at("interpolant").get<std::string>();
      if (k == "cubic") c.physics.interp = Interpolant::cubic;
      else if (k == "identity") c.physics.interp = Interpolant::identity;
      else bad("interpolant must be 'cubic' or 'identity'");
    }
  }
  if (j.contains("stepper")) {
    const auto& s = j.at("stepper");
    only_keys(s, "stepper", {"L1", "L2", "dt", "max_steps", "stop_tol", "checkpoint_every", "trace_every"});
    read(s, "L1", c.stepper.L1);
    read(s, "L2", c.stepper.L2);
    read(s, "dt", c.stepper.dt);
    read(s, "max_steps", c.stepper.max_steps);
    if (s.contains("stop_tol"))
      c.stepper.stop_tol =
          s.at("stop_tol").is_null() ? std::numeric_limits<double>::infinity() : s.at("stop_tol").get<double>();
    read(s, "checkpoint_every", c.stepper.checkpoint_every);
    read(s, "trace_every", c.stepper.trace_every);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    only_keys(g, "grid", {"dim", "points", "lengths"});
    int dim = 2;
    read(g, "dim", dim);
    if (dim != 2 && dim != 3) bad("grid dim must be 2 or 3");
    std::vector<int> pts;
    std::vector<double> lens;
    read(g, "points", pts);
    read(g, "lengths", lens);
    if (pts.size() != static_cast<std::size_t>(dim) || lens.size() != static_cast<std::size_t>(dim))
      bad("grid points and lengths need one entry per axis");
    std::array<int, 3> p{1, 1, 1};
    std::array<double, 3> l{1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
      p[a] = pts[a];
      l[a] = lens[a];
    }
    c.grid = GridSpec::make(dim, p, l);
  }
  if (j.contains("init")) {
    const auto& in = j.at("init");
    if (!in.is_object() || !in.contains("type")) bad("init needs a 'type'");
    const auto type = in.at("type").get<std::string>();
    if (type == "bilayer") {
      only_keys(in, "init", {"type", "shape", "u_half_thickness", "v_thickness", "epsilon"});
      BilayerSpec b;
      if (in.contains("shape")) b.shape = shape_from(in.at("shape"));
      read(in, "u_half_thickness", b.u_half_thickness);
      b.epsilon = c.physics.epsilon;
      read(in, "epsilon", b.epsilon);
      if (in.contains("v_thickness") && !in.at("v_thickness").is_null())
        b.v_thickness = in.at("v_thickness").get<double>();
      c.init = b;
    } else if (type == "radial") {
      only_keys(in, "init", {"type", "center", "radii"});
      RadialInit r;
      r.center = read_vec(in, "center");
      std::vector<double> radii;
      read(in, "radii", radii);
      if (radii.size() != 4) bad("radial init needs radii [R0, R1, R2, R3]");
      r.r0 = radii[0];
      r.r1 = radii[1];
      r.r2 = radii[2];
      r.r3 = radii[3];
      c.init = r;
    } else if (type == "checkpoint") {
      only_keys(in, "init", {"type", "path"});
      CheckpointInit k;
      read(in, "path", k.path);
      if (k.path.empty()) bad("checkpoint init needs a path");
      c.init = k;
    } else {
      bad("unknown init type '" + type + "'");
    }
  }
  read(j, "rescale_mass", c.rescale_mass);
  if (j.contains("perturb") && !j.at("perturb").is_null()) {
    const auto& pt = j.at("perturb");
    if (!pt.is_object() || !pt.contains("type")) bad("perturb needs a 'type'");
    const auto type = pt.at("type").get<std::string>();
    if (type == "noise") {
      only_keys(pt, "perturb", {"type", "amplitude", "seed"});
      NoisePerturb n;
      read(pt, "amplitude", n.amplitude);
      read(pt, "seed", n.seed);
      c.perturb = n;
    } else if (type == "hole") {
      only_keys(pt, "perturb", {"type", "center", "radius"});
      HolePerturb h;
      h.center = read_vec(pt, "center");
      read(pt, "radius", h.radius);
      c.perturb = h;
    } else {
      bad("unknown perturb type '" + type + "'");
    }
  }
  read(j, "output_dir", c.output_dir);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(Errc::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream os(path);
  if (!os) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  os << to_json(c) << '\n';
  if (!os) throw Error(Errc::io, "write failed: " + path.string());
}

}  // namespace okpf
