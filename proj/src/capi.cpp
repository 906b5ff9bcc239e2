#include "okpf/okpf.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "okpf/analysis.hpp"
#include "okpf/error.hpp"
#include "okpf/io.hpp"
#include "okpf/radial.hpp"

struct okpf_config {
  okpf::RunConfig cfg;
};

struct okpf_state {
  okpf::RunState s;
};

namespace {

thread_local std::string last_error;

template <class F>
okpf_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return OKPF_OK;
  } catch (const okpf::Error& e) {
    last_error = e.what();
    return static_cast<okpf_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return OKPF_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return OKPF_E_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (!p) throw okpf::Error(okpf::Errc::invalid_argument, std::string(name) + " must not be NULL");
}

okpf::PhysParams phys(const okpf_phys* p) {
  okpf::PhysParams q;
  if (p) {
    q.zeta = p->zeta;
    q.gamma = p->gamma;
    q.mass = p->mass;
    q.epsilon = p->epsilon;
    q.K1 = p->K1;
    q.K2 = p->K2;
    q.v_reg = p->v_reg;
    q.interp = p->identity_interpolant ? okpf::Interpolant::identity : okpf::Interpolant::cubic;
  }
  q.validate();
  return q;
}

void to_c(const okpf::PhysParams& q, okpf_phys* p) {
  p->zeta = q.zeta;
  p->gamma = q.gamma;
  p->mass = q.mass;
  p->epsilon = q.epsilon;
  p->K1 = q.K1;
  p->K2 = q.K2;
  p->v_reg = q.v_reg;
  p->identity_interpolant = q.interp == okpf::Interpolant::identity;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* okpf_last_error(void) { return last_error.c_str(); }

const char* okpf_status_name(okpf_status s) {
  switch (s) {
    case OKPF_OK: return "ok";
    case OKPF_E_INVALID_ARGUMENT: return "invalid argument";
    case OKPF_E_INVALID_FIELD: return "invalid field";
    case OKPF_E_GRID_MISMATCH: return "grid mismatch";
    case OKPF_E_DIVERGENCE: return "divergence";
    case OKPF_E_INVALID_CANDIDATE: return "invalid candidate";
    case OKPF_E_OPTIMIZER: return "optimizer failure";
    case OKPF_E_OUT_OF_RANGE: return "out of range";
    case OKPF_E_IO: return "I/O error";
    case OKPF_E_CORRUPT_FILE: return "corrupt file";
    case OKPF_E_UNSUPPORTED_VERSION: return "unsupported version";
    case OKPF_E_DEGENERATE: return "degenerate input";
    case OKPF_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

void okpf_free(void* p) { std::free(p); }

void okpf_phys_default(okpf_phys* out) {
  if (out) to_c(okpf::PhysParams{}, out);
}

okpf_status okpf_config_load(const char* path, okpf_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new okpf_config{okpf::load_config(path)};
  });
}

okpf_status okpf_config_parse(const char* json, okpf_config** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new okpf_config{okpf::config_from_json(json)};
  });
}

okpf_status okpf_config_save(const okpf_config* c, const char* path) {
  return guard([&] {
    need(c, "config");
    need(path, "path");
    okpf::save_config(path, c->cfg);
  });
}

okpf_status okpf_config_to_json(const okpf_config* c, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = dup(okpf::to_json(c->cfg));
  });
}

okpf_status okpf_config_physics(const okpf_config* c, okpf_phys* out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    to_c(c->cfg.physics, out);
  });
}

void okpf_config_free(okpf_config* c) { delete c; }

okpf_status okpf_run(const okpf_config* c, okpf_trace_fn fn, void* user, okpf_state** final_state,
                     okpf_run_info* info) {
  if (info) *info = okpf_run_info{};
  return guard([&] {
    need(c, "config");
    auto on_row = [&](const okpf::TraceRow& r) {
      if (!fn) return;
      const okpf_trace_row row{r.step,
                               r.time,
                               r.energy.total,
                               r.energy.perimeter,
                               r.energy.nonlocal,
                               r.energy.constraint,
                               r.energy.v_regularization,
                               r.mass_u,
                               r.mass_v,
                               r.residual};
      fn(&row, user);
    };
    okpf::RunResult r;
    try {
      r = okpf::run_config(c->cfg, on_row);
    } catch (const okpf::DivergenceError& e) {
      if (info) info->diverged_step = e.step();
      throw;
    }
    if (info) {
      info->converged = r.reason == okpf::Termination::converged;
      info->steps = r.state.step;
      info->residual = r.residual;
    }
    if (final_state) *final_state = new okpf_state{std::move(r.state)};
  });
}

okpf_status okpf_checkpoint_read(const char* path, okpf_state** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new okpf_state{okpf::read_checkpoint(path)};
  });
}

okpf_status okpf_checkpoint_write(const okpf_state* s, const char* path) {
  return guard([&] {
    need(s, "state");
    need(path, "path");
    okpf::write_checkpoint(path, s->s);
  });
}

void okpf_state_free(okpf_state* s) { delete s; }

okpf_status okpf_state_info_get(const okpf_state* s, okpf_state_info* out) {
  return guard([&] {
    need(s, "state");
    need(out, "out");
    const auto& g = s->s.u.grid;
    out->dim = g.dim;
    for (int a = 0; a < 3; ++a) {
      out->points[a] = a < g.dim ? g.points[a] : 1;
      out->lengths[a] = a < g.dim ? g.lengths[a] : 0.0;
    }
    out->time = s->s.time;
    out->step = s->s.step;
  });
}

okpf_status okpf_state_energy(const okpf_state* s, const okpf_phys* p, okpf_energy* out) {
  return guard([&] {
    need(s, "state");
    need(out, "out");
    const auto q = phys(p);
    const auto e = okpf::total_energy(s->s.u, s->s.v, q);
    out->perimeter = e.perimeter;
    out->nonlocal = e.nonlocal;
    out->constraint = e.constraint;
    out->v_regularization = e.v_regularization;
    out->total = e.total;
    out->mass_u = okpf::integrate(okpf::apply_interpolant(s->s.u, q.interp));
    out->mass_v = okpf::integrate(okpf::apply_interpolant(s->s.v, q.interp));
  });
}

okpf_status okpf_state_screening(const okpf_state* s, const okpf_phys* p, double threshold, double* ratio) {
  return guard([&] {
    need(s, "state");
    need(ratio, "ratio");
    const auto r = okpf::screening_check(s->s.u, s->s.v, phys(p), threshold);
    if (!r) throw okpf::Error(okpf::Errc::degenerate, "screening: empty exterior or vanishing potential");
    *ratio = *r;
  });
}

okpf_status okpf_state_render(const okpf_state* s, int axis, int index, const char* path) {
  return guard([&] {
    need(s, "state");
    need(path, "path");
    okpf::render_cross_section(s->s.u, s->s.v, okpf::Plane{axis, index}, path);
  });
}

okpf_status okpf_state_dipole_shift(okpf_state* s, const okpf_phys* p, double shift[3]) {
  return guard([&] {
    need(s, "state");
    okpf::Field w = okpf::charge_density(s->s.u, s->s.v, phys(p));
    const double mean = okpf::integrate(w) / w.grid.volume();
    for (auto& x : w.values) x -= mean;
    const auto d = okpf::zero_dipole_shift(w);
    s->s.u = okpf::fourier_shift(s->s.u, d.shift);
    s->s.v = okpf::fourier_shift(s->s.v, d.shift);
    if (shift)
      for (int a = 0; a < 3; ++a) shift[a] = d.shift[a];
  });
}

okpf_status okpf_radial_optimize(int n, double zeta, double gamma, double m, int equal_mass,
                                 okpf_radial_result* out) {
  return guard([&] {
    need(out, "out");
    const auto o = okpf::radial::optimize_liposome(m, zeta, gamma, n, equal_mass != 0);
    out->r0 = o.candidate.r0;
    out->r1 = o.candidate.r1;
    out->r2 = o.candidate.r2;
    out->r3 = o.candidate.r3;
    out->perimeter = o.energy.perimeter;
    out->nonlocal = o.energy.nonlocal;
    out->total = o.energy.total;
    out->energy_per_mass = o.energy.total / o.mass;
    out->residual[0] = o.residual[0];
    out->residual[1] = o.residual[1];
  });
}

okpf_status okpf_radial_asymptotic(int n, double zeta, double gamma, double m, int equal_mass,
                                   okpf_asymptotic* out) {
  return guard([&] {
    need(out, "out");
    const auto a = okpf::radial::asymptotic_liposome(m, zeta, gamma, n, equal_mass != 0);
    *out = okpf_asymptotic{a.energy_per_mass, a.leading, a.correction, a.t01, a.t12, a.t23,
                           a.mid_radius, a.shell_mass_imbalance, a.remainder_order};
  });
}

okpf_status okpf_micelle_optimal(int n, double zeta, double gamma, double* m_star, double* energy_per_mass) {
  return guard([&] {
    const auto o = okpf::radial::micelle_optimal(zeta, gamma, n);
    if (m_star) *m_star = o.m_star;
    if (energy_per_mass) *energy_per_mass = o.min_energy_per_mass;
  });
}

okpf_status okpf_thresholds_get(okpf_thresholds* out) {
  return guard([&] {
    need(out, "out");
    const auto t = okpf::radial::thresholds();
    *out = okpf_thresholds{t.zeta0, t.zeta1, t.zeta2};
  });
}

okpf_status okpf_morphology(double zeta, double* c, int* branch, int* below_zeta0) {
  return guard([&] {
    const auto m = okpf::radial::morphology(zeta);
    if (c) *c = m.c;
    if (branch) *branch = static_cast<int>(m.branch);
    if (below_zeta0) *below_zeta0 = m.below_zeta0;
  });
}

okpf_status okpf_branch_values(double zeta, double* bilayer, double* cylinder, double* sphere) {
  return guard([&] {
    using B = okpf::radial::MorphologyBranches;
    if (bilayer) *bilayer = B::bilayer(zeta);
    if (cylinder) *cylinder = B::cylinder(zeta);
    if (sphere) *sphere = B::sphere(zeta);
  });
}

okpf_status okpf_helfrich(double zeta, double* lambda1, double* lambda2) {
  return guard([&] {
    const auto h = okpf::radial::helfrich_moduli(zeta);
    if (lambda1) *lambda1 = h.lambda1;
    if (lambda2) *lambda2 = h.lambda2;
  });
}

okpf_status okpf_fit(const double* m, const double* ratio, size_t n, const double* fix_p, okpf_fit_result* out) {
  return guard([&] {
    need(m, "m");
    need(ratio, "ratio");
    need(out, "out");
    std::vector<std::pair<double, double>> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {m[i], ratio[i]};
    std::optional<double> p;
    if (fix_p) p = *fix_p;
    const auto f = okpf::fit_energy_mass(pts, p);
    *out = okpf_fit_result{f.a, f.b, f.p, f.rms_residual};
  });
}

okpf_status okpf_read_points(const char* path, double** m, double** ratio, size_t* n) {
  return guard([&] {
    need(path, "path");
    need(m, "m");
    need(ratio, "ratio");
    need(n, "n");
    const auto pts = okpf::read_points(path);
    const std::size_t bytes = std::max<std::size_t>(pts.size(), 1) * sizeof(double);
    double* a = static_cast<double*>(std::malloc(bytes));
    double* b = static_cast<double*>(std::malloc(bytes));
    if (!a || !b) {
      std::free(a);
      std::free(b);
      throw std::bad_alloc();
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      a[i] = pts[i].first;
      b[i] = pts[i].second;
    }
    *m = a;
    *ratio = b;
    *n = pts.size();
  });
}

}  // extern "C"
