#include <cstdio>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

namespace okpf {

TraceRow make_trace_row(const RunState& s, const PhysParams& p, double residual) {
  TraceRow r;
  r.step = s.step;
  r.time = s.time;
  r.energy = s.last_energy;
  r.mass_u = integrate(apply_interpolant(s.u, p.interp));
  r.mass_v = integrate(apply_interpolant(s.v, p.interp));
  r.residual = residual;
  return r;
}

RunState initial_state(const RunConfig& c) {
  c.validate();
  RunState s;
  bool rescale = c.rescale_mass;
  if (const auto* k = std::get_if<CheckpointInit>(&c.init)) {
    s = read_checkpoint(k->path);
    if (s.u.grid != c.grid) throw Error(Errc::grid_mismatch, "checkpoint grid differs from the configured grid");
    rescale = false;
  } else if (const auto* b = std::get_if<BilayerSpec>(&c.init)) {
    auto f = build_bilayer(*b, c.grid, c.physics.zeta);
    s.u = std::move(f.u);
    s.v = std::move(f.v);
  } else {
    const auto& r = std::get<RadialInit>(c.init);
    radial::RadialCandidate cand{c.grid.dim, c.physics.zeta, r.r0, r.r1, r.r2, r.r3};
    auto f = build_radial(cand, r.center, c.grid, c.physics.epsilon);
    s.u = std::move(f.u);
    s.v = std::move(f.v);
  }

  if (const auto* h = std::get_if<HolePerturb>(&c.perturb)) {
    auto f = perforate(s.u, s.v, h->center, h->radius, c.physics.epsilon);
    s.u = std::move(f.u);
    s.v = std::move(f.v);
  } else if (const auto* n = std::get_if<NoisePerturb>(&c.perturb)) {
    add_noise(s.u, n->amplitude, n->seed);
    add_noise(s.v, n->amplitude, n->seed + 1);
    rescale = true;
  }
  if (rescale) {
    s.u = mass_rescale(s.u, c.physics.mass);
    s.v = mass_rescale(s.v, c.physics.zeta * c.physics.mass);
  }
  return s;
}

RunResult run_config(const RunConfig& c, const std::function<void(const TraceRow&)>& on_trace) {
  RunState s = initial_state(c);
  const std::filesystem::path dir(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  const auto trace = dir / "trace.csv";
  std::filesystem::remove(trace, ec);

  RunCallbacks cb;
  cb.on_trace = [&](const RunState& st, double residual) {
    const TraceRow row = make_trace_row(st, c.physics, residual);
    append_trace(trace, row);
    if (on_trace) on_trace(row);
  };
  cb.on_checkpoint = [&](const RunState& st) {
    char name[64];
    std::snprintf(name, sizeof name, "ckpt_%08llu.okpf", static_cast<unsigned long long>(st.step));
    write_checkpoint(dir / name, st);
  };
  RunResult r = run(std::move(s), c.physics, c.stepper, cb);
  write_checkpoint(dir / "final.okpf", r.state);
  return r;
}

}  // namespace okpf
