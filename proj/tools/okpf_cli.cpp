#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "okpf/okpf.h"

namespace {

constexpr int exit_usage = 1;
constexpr int exit_divergence = 2;
constexpr int exit_io = 3;

int exit_code(okpf_status s) {
  switch (s) {
    case OKPF_OK: return 0;
    case OKPF_E_DIVERGENCE: return exit_divergence;
    case OKPF_E_IO:
    case OKPF_E_CORRUPT_FILE:
    case OKPF_E_UNSUPPORTED_VERSION: return exit_io;
    default: return exit_usage;
  }
}

struct Failed {
  okpf_status status;
};

void check(okpf_status s) {
  if (s != OKPF_OK) throw Failed{s};
}

void line(const char* key, double x) { std::printf("%s %.17g\n", key, x); }

struct PhysOpts {
  std::string config;
  okpf_phys p{};

  void add(CLI::App* app) {
    okpf_phys_default(&p);
    app->add_option("--config", config, "take the physical parameters from this run config");
    app->add_option("--zeta", p.zeta, "head-to-tail mass ratio");
    app->add_option("--gamma", p.gamma, "nonlocal strength");
    app->add_option("--mass", p.mass, "U mass");
    app->add_option("--epsilon", p.epsilon, "interface width");
    app->add_option("--K1", p.K1, "U mass penalty");
    app->add_option("--K2", p.K2, "V mass penalty");
    app->add_option("--v-reg", p.v_reg, "V gradient regularisation");
  }

  okpf_phys get() const {
    if (config.empty()) return p;
    okpf_config* c = nullptr;
    check(okpf_config_load(config.c_str(), &c));
    okpf_phys out;
    const okpf_status s = okpf_config_physics(c, &out);
    okpf_config_free(c);
    check(s);
    return out;
  }
};

struct StateHandle {
  okpf_state* s = nullptr;
  explicit StateHandle(const std::string& path) { check(okpf_checkpoint_read(path.c_str(), &s)); }
  ~StateHandle() { okpf_state_free(s); }
  StateHandle(const StateHandle&) = delete;
  StateHandle& operator=(const StateHandle&) = delete;
};

void print_row(const okpf_trace_row* r, void*) {
  std::printf("step %llu time %.17g E %.17g residual %.17g\n", static_cast<unsigned long long>(r->step), r->time,
              r->E, r->residual);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"okpf-cli: degenerate Ohta-Kawasaki phase-field simulator and radial analysis"};
  app.require_subcommand(1);

  std::string run_config;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run the gradient flow from a config file");
  run->add_option("config", run_config, "run config (JSON)")->required();
  run->add_flag("--quiet", quiet, "do not echo trace rows");

  std::string energy_ckpt;
  PhysOpts energy_phys;
  auto* energy = app.add_subcommand("energy", "energy breakdown of a checkpoint");
  energy->add_option("checkpoint", energy_ckpt)->required();
  energy_phys.add(energy);

  int rn = 3;
  double rzeta = 1.0, rgamma = 1.0, rm = 1.0;
  bool requal = false, rasym = false;
  auto* rad = app.add_subcommand("radial", "sharp-interface radial liposome optimum or asymptotics");
  rad->add_option("--n", rn, "dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  rad->add_option("--zeta", rzeta, "head-to-tail mass ratio");
  rad->add_option("--gamma", rgamma, "nonlocal strength");
  rad->add_option("--m", rm, "U mass");
  rad->add_flag("--equal-mass", requal, "split the V mass equally between the layers");
  rad->add_flag("--asymptotic", rasym, "print the large-mass expansion instead of optimizing");

  double zmin = 0.1, zmax = 6.0;
  int zsteps = 60;
  auto* roots = app.add_subcommand("roots", "morphology thresholds and c(zeta) table");
  roots->add_option("--zeta-min", zmin);
  roots->add_option("--zeta-max", zmax);
  roots->add_option("--steps", zsteps)->check(CLI::PositiveNumber);

  std::vector<std::string> fit_files;
  double fit_p = 0.0;
  auto* fit = app.add_subcommand("fit", "fit E/m = a + b m^-p to traces or (m, E/m) point files");
  fit->add_option("files", fit_files)->required();
  auto* fit_p_opt = fit->add_option("--p", fit_p, "fix the exponent");

  std::string render_ckpt, render_out;
  int raxis = 2, rindex = -1;
  bool stack = false;
  auto* render = app.add_subcommand("render", "PNG cross-section of a checkpoint");
  render->add_option("checkpoint", render_ckpt)->required();
  render->add_option("output", render_out, "PNG path, or a directory with --stack")->required();
  render->add_option("--axis", raxis, "normal axis of the plane (3-D)")->check(CLI::Range(0, 2));
  render->add_option("--index", rindex, "plane index (default: middle)");
  render->add_flag("--stack", stack, "write every plane along --axis");

  std::string dip_in, dip_out;
  PhysOpts dip_phys;
  auto* dipole = app.add_subcommand("dipole", "translate a checkpoint to zero charge dipole");
  dipole->add_option("checkpoint", dip_in)->required();
  dipole->add_option("output", dip_out)->required();
  dip_phys.add(dipole);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : exit_usage;
  }

  try {
    if (*run) {
      okpf_config* c = nullptr;
      check(okpf_config_load(run_config.c_str(), &c));
      okpf_phys p;
      if (const okpf_status ps = okpf_config_physics(c, &p); ps != OKPF_OK) {
        okpf_config_free(c);
        throw Failed{ps};
      }
      okpf_run_info info{};
      okpf_state* fin = nullptr;
      const okpf_status s = okpf_run(c, quiet ? nullptr : &print_row, nullptr, &fin, &info);
      okpf_config_free(c);
      if (s == OKPF_E_DIVERGENCE)
        std::fprintf(stderr, "diverged at step %llu\n", static_cast<unsigned long long>(info.diverged_step));
      check(s);
      okpf_energy e;
      const okpf_status es = okpf_state_energy(fin, &p, &e);
      okpf_state_free(fin);
      check(es);
      std::printf("termination %s\n", info.converged ? "converged" : "max_steps");
      line("steps", static_cast<double>(info.steps));
      line("residual", info.residual);
      line("E", e.total);
      line("E_over_m", e.total / p.mass);
    } else if (*energy) {
      StateHandle st(energy_ckpt);
      const okpf_phys p = energy_phys.get();
      okpf_energy e;
      check(okpf_state_energy(st.s, &p, &e));
      line("P", e.perimeter);
      line("N", e.nonlocal);
      line("C", e.constraint);
      line("Reg", e.v_regularization);
      line("E", e.total);
      line("mass_u", e.mass_u);
      line("mass_v", e.mass_v);
      line("E_over_m", e.total / p.mass);
    } else if (*rad) {
      if (rasym) {
        okpf_asymptotic a;
        check(okpf_radial_asymptotic(rn, rzeta, rgamma, rm, requal, &a));
        line("leading_E_over_m", a.leading);
        line("correction", a.correction);
        line("E_over_m", a.energy_per_mass);
        line("t01", a.t01);
        line("t12", a.t12);
        line("t23", a.t23);
        line("mid_radius", a.mid_radius);
        line("shell_mass_imbalance", a.shell_mass_imbalance);
        line("remainder_order", a.remainder_order);
      } else {
        okpf_radial_result r;
        check(okpf_radial_optimize(rn, rzeta, rgamma, rm, requal, &r));
        line("R0", r.r0);
        line("R1", r.r1);
        line("R2", r.r2);
        line("R3", r.r3);
        line("P", r.perimeter);
        line("N", r.nonlocal);
        line("E", r.total);
        line("E_over_m", r.energy_per_mass);
        line("residual_1", r.residual[0]);
        line("residual_2", r.residual[1]);
      }
    } else if (*roots) {
      okpf_thresholds t;
      check(okpf_thresholds_get(&t));
      line("zeta0", t.zeta0);
      line("zeta1", t.zeta1);
      line("zeta2", t.zeta2);
      std::printf("zeta c bilayer cylinder sphere branch\n");
      static const char* names[] = {"bilayer", "cylinder", "sphere"};
      for (int i = 0; i <= zsteps; ++i) {
        const double z = zmin + (zmax - zmin) * i / zsteps;
        double c, b, cy, sp;
        int br, below;
        check(okpf_morphology(z, &c, &br, &below));
        check(okpf_branch_values(z, &b, &cy, &sp));
        std::printf("%.17g %.17g %.17g %.17g %.17g %s%s\n", z, c, b, cy, sp, names[br], below ? " (below zeta0)" : "");
      }
    } else if (*fit) {
      std::vector<double> ms, ys;
      for (const auto& f : fit_files) {
        double *m = nullptr, *y = nullptr;
        size_t n = 0;
        check(okpf_read_points(f.c_str(), &m, &y, &n));
        ms.insert(ms.end(), m, m + n);
        ys.insert(ys.end(), y, y + n);
        okpf_free(m);
        okpf_free(y);
      }
      okpf_fit_result r;
      check(okpf_fit(ms.data(), ys.data(), ms.size(), *fit_p_opt ? &fit_p : nullptr, &r));
      line("a", r.a);
      line("b", r.b);
      line("p", r.p);
      line("rms_residual", r.rms_residual);
    } else if (*render) {
      StateHandle st(render_ckpt);
      okpf_state_info info;
      check(okpf_state_info_get(st.s, &info));
      const int along = info.dim == 3 ? info.points[raxis] : 1;
      if (stack) {
        std::filesystem::create_directories(render_out);
        for (int i = 0; i < along; ++i) {
          char name[32];
          std::snprintf(name, sizeof name, "slice_%04d.png", i);
          check(okpf_state_render(st.s, raxis, i, (std::filesystem::path(render_out) / name).string().c_str()));
        }
      } else {
        check(okpf_state_render(st.s, raxis, rindex < 0 ? along / 2 : rindex, render_out.c_str()));
      }
    } else if (*dipole) {
      StateHandle st(dip_in);
      const okpf_phys p = dip_phys.get();
      double t[3];
      check(okpf_state_dipole_shift(st.s, &p, t));
      check(okpf_checkpoint_write(st.s, dip_out.c_str()));
      line("shift_x", t[0]);
      line("shift_y", t[1]);
      line("shift_z", t[2]);
    }
  } catch (const Failed& f) {
    std::fprintf(stderr, "error: %s: %s\n", okpf_status_name(f.status), okpf_last_error());
    return exit_code(f.status);
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_io;
  }
  return 0;
}
