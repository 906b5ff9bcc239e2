#include "okpf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "okpf/error.hpp"

namespace okpf {

void StepperConfig::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0) || !(dt > 0.0) || !std::isfinite(L1) || !std::isfinite(L2) ||
      !std::isfinite(dt))
    throw Error(Errc::invalid_argument, "L1, L2, dt must be positive and finite");
  if (!(stop_tol > 0.0)) throw Error(Errc::invalid_argument, "stop_tol must be positive");
  if (checkpoint_every == 0 || trace_every == 0)
    throw Error(Errc::invalid_argument, "trace/checkpoint cadence must be positive");
}

std::pair<double, double> split_W(double u, double v) {
  const double w1 = 0.5 * SplitConstants::a_uu * u * u + SplitConstants::a_uv * u * v +
                    0.5 * SplitConstants::a_vv * v * v;
  return {w1, potential_W(u, v) - w1};
}

std::pair<double, double> linear_amplification(double k2, const PhysParams& p,
                                               const StepperConfig& cfg) {
  const double du = 1.0 + cfg.dt * cfg.L1 * (p.epsilon * k2 + SplitConstants::a_uu / p.epsilon);
  const double dv =
      1.0 + cfg.dt * cfg.L2 * (2.0 * p.v_reg * k2 + SplitConstants::a_vv / p.epsilon);
  return {1.0 / du, 1.0 / dv};
}

struct Stepper::Impl {
  Spectral sp;
  std::vector<double> inv_u, inv_v;
  std::vector<std::complex<double>> cu, cv, cw;
  Field w, phi, ru, rv;
  explicit Impl(const GridSpec& g) : sp(g), w(g), phi(g), ru(g), rv(g) {
    cu.resize(sp.modes());
    cv.resize(sp.modes());
    cw.resize(sp.modes());
  }
};

Stepper::Stepper(const GridSpec& g, const PhysParams& p, const StepperConfig& cfg)
    : p_(p), cfg_(cfg), impl_(std::make_unique<Impl>(g)) {
  p_.validate();
  cfg_.validate();
  const auto& k2 = impl_->sp.k2();
  impl_->inv_u.resize(k2.size());
  impl_->inv_v.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    auto [au, av] = linear_amplification(k2[i], p_, cfg_);
    impl_->inv_u[i] = au;
    impl_->inv_v[i] = av;
  }
}

Stepper::~Stepper() = default;

double Stepper::advance(RunState& s) {
  auto& m = *impl_;
  const auto& g = m.sp.grid();
  if (s.u.grid != g || s.v.grid != g) throw Error(Errc::grid_mismatch, "state grid differs from stepper");
  const std::size_t n = g.size();
  const double cell = g.cell_volume();
  const double eps = p_.epsilon;
  const double dt = cfg_.dt;

  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fu = interpolant(s.u[i], p_.interp);
    const double fv = interpolant(s.v[i], p_.interp);
    mu += fu;
    mv += fv;
    m.w[i] = fu - fv / p_.zeta;
  }
  mu *= cell;
  mv *= cell;
  const double pu = p_.K1 * (p_.mass - mu);
  const double pv = p_.K2 * (p_.zeta * p_.mass - mv);

  m.sp.forward(m.w.values.data(), m.cw.data());
  const auto& k2 = m.sp.k2();
  m.cw[0] = 0.0;
  for (std::size_t i = 1; i < m.cw.size(); ++i) m.cw[i] /= k2[i];
  m.sp.inverse(m.cw.data(), m.phi.values.data());

  // explicit pieces: ∇W - diag(87u, 54v), nonlocal and penalty forces
  for (std::size_t i = 0; i < n; ++i) {
    const double u = s.u[i], v = s.v[i];
    const auto [wu, wv] = potential_W_grad(u, v);
    const double fu = interpolant_deriv(u, p_.interp);
    const double fv = interpolant_deriv(v, p_.interp);
    const double eu = (wu - SplitConstants::a_uu * u) / eps + p_.gamma * m.phi[i] * fu - pu * fu;
    const double ev =
        (wv - SplitConstants::a_vv * v) / eps - (p_.gamma / p_.zeta) * m.phi[i] * fv - pv * fv;
    m.ru[i] = u - dt * cfg_.L1 * eu;
    m.rv[i] = v - dt * cfg_.L2 * ev;
  }
  m.sp.forward(m.ru.values.data(), m.cu.data());
  m.sp.forward(m.rv.values.data(), m.cv.data());
  for (std::size_t i = 0; i < m.cu.size(); ++i) {
    m.cu[i] *= m.inv_u[i];
    m.cv[i] *= m.inv_v[i];
  }
  m.sp.inverse(m.cu.data(), m.ru.values.data());
  m.sp.inverse(m.cv.data(), m.rv.values.data());

  const std::uint64_t next = s.step + 1;
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(m.ru[i]) || !std::isfinite(m.rv[i])) {
      std::ostringstream os;
      os << "non-finite sample at index " << i << " after step " << next;
      throw DivergenceError(next, os.str());
    }
    res = std::max(res, std::abs(m.ru[i] - s.u[i]));
    res = std::max(res, std::abs(m.rv[i] - s.v[i]));
  }
  std::swap(s.u.values, m.ru.values);
  std::swap(s.v.values, m.rv.values);
  s.step = next;
  s.time = static_cast<double>(next) * dt;
  return res / dt;
}

RunState step(const RunState& s, const PhysParams& p, const StepperConfig& cfg, double* residual) {
  Stepper st(s.u.grid, p, cfg);
  RunState out = s;
  const double r = st.advance(out);
  if (residual) *residual = r;
  return out;
}

RunResult run(RunState s, const PhysParams& p, const StepperConfig& cfg, const RunCallbacks& cb) {
  require_same_grid(s.u, s.v);
  require_finite(s.u, "u");
  require_finite(s.v, "v");
  Stepper st(s.u.grid, p, cfg);
  RunResult out;
  const bool use_tol = std::isfinite(cfg.stop_tol);
  std::uint64_t traced = UINT64_MAX, saved = UINT64_MAX;

  auto report = [&](bool force) {
    if ((force || s.step % cfg.trace_every == 0) && traced != s.step && cb.on_trace) {
      s.last_energy = total_energy(s.u, s.v, p);
      cb.on_trace(s, out.residual);
      traced = s.step;
    }
    if ((force || s.step % cfg.checkpoint_every == 0) && saved != s.step && cb.on_checkpoint) {
      cb.on_checkpoint(s);
      saved = s.step;
    }
  };

  report(true);
  out.reason = Termination::max_steps;
  while (s.step < cfg.max_steps) {
    out.residual = st.advance(s);
    if (use_tol && out.residual < cfg.stop_tol) {
      out.reason = Termination::converged;
      break;
    }
    report(false);
  }
  report(true);
  s.last_energy = total_energy(s.u, s.v, p);
  out.state = std::move(s);
  return out;
}

std::optional<double> screening_check(const Field& u, const Field& v, const PhysParams& p,
                                      double threshold) {
  const Field phi = nonlocal_term(u, v, p).phi;
  double ext_sum = 0.0;
  std::size_t ext_n = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] + v[i] < threshold) {
      ext_sum += phi[i];
      ++ext_n;
    }
  if (ext_n == 0) return std::nullopt;
  const double c = ext_sum / static_cast<double>(ext_n);
  double ext_max = 0.0, all_max = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(phi[i] - c);
    all_max = std::max(all_max, a);
    if (u[i] + v[i] < threshold) ext_max = std::max(ext_max, a);
  }
  if (!(all_max > 0.0)) return std::nullopt;
  return ext_max / all_max;
}

}  // namespace okpf
