#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "okpf/dynamics.hpp"
#include "okpf/energy.hpp"
#include "okpf/grid.hpp"
#include "okpf/initcond.hpp"

namespace okpf {

// Binary layout, all little-endian: "OKPF", u32 version (1), u32 dim,
// u32 count per axis, f64 length per axis, f64 time, u64 step, u then v as f64, x fastest.
constexpr std::uint32_t checkpoint_version = 1;

void write_checkpoint(const std::filesystem::path& path, const RunState& s);
// throws CorruptFileError (with the byte offset) or Errc::unsupported_version
RunState read_checkpoint(const std::filesystem::path& path);

struct TraceRow {
  std::uint64_t step = 0;
  double time = 0.0;
  EnergyBreakdown energy{};
  double mass_u = 0.0;
  double mass_v = 0.0;
  double residual = 0.0;
};

inline constexpr const char* trace_header = "step,time,E,P,N,C,Reg,mass_u,mass_v,residual";

// writes the header first when the file is missing or empty
void append_trace(const std::filesystem::path& path, const TraceRow& row);
std::vector<TraceRow> read_trace(const std::filesystem::path& path);

// (m, E/m) points: a trace contributes its last row with m = mass_u; any other
// file is read as two columns "m ratio" (comma or whitespace separated, '#' comments).
std::vector<std::pair<double, double>> read_points(const std::filesystem::path& path);

struct CheckpointInit {
  std::string path;
  bool operator==(const CheckpointInit&) const = default;
};

struct RadialInit {
  Vec3 center{};
  double r0 = 0.0, r1 = 0.0, r2 = 0.0, r3 = 0.0;
  bool operator==(const RadialInit&) const = default;
};

using InitSpec = std::variant<BilayerSpec, RadialInit, CheckpointInit>;

struct NoisePerturb {
  double amplitude = 0.01;
  std::uint64_t seed = 0;
  bool operator==(const NoisePerturb&) const = default;
};

struct HolePerturb {
  Vec3 center{};
  double radius = 0.0;
  bool operator==(const HolePerturb&) const = default;
};

using Perturb = std::variant<std::monostate, NoisePerturb, HolePerturb>;

struct RunConfig {
  PhysParams physics{};
  StepperConfig stepper{};
  GridSpec grid = GridSpec::square(256, 2.6);
  InitSpec init = BilayerSpec{};
  // rescale generated seeds to ∫u = m and ∫v = ζm; noise always triggers it
  bool rescale_mass = true;
  Perturb perturb{};
  std::string output_dir = "out";

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& c);

struct Plane {
  // axis normal to the plane; ignored for 2-D grids
  int axis = 2;
  int index = 0;
};

struct Rgb {
  std::uint8_t r, g, b;
  bool operator==(const Rgb&) const = default;
};

Rgb phase_color(double u, double v);
// pixel rows in the order they are written to the image
std::vector<Rgb> cross_section_pixels(const Field& u, const Field& v, const Plane& plane, int* width,
                                      int* height);
void render_cross_section(const Field& u, const Field& v, const Plane& plane,
                          const std::filesystem::path& path);

RunState initial_state(const RunConfig& c);

// Runs from the config, writing trace.csv, ckpt_<step>.okpf and final.okpf to
// the output directory; on_trace observes each trace row as it is written.
RunResult run_config(const RunConfig& c, const std::function<void(const TraceRow&)>& on_trace = {});

TraceRow make_trace_row(const RunState& s, const PhysParams& p, double residual);

}  // namespace okpf
