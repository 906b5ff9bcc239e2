#include "okpf/energy.hpp"

#include <algorithm>
#include <cmath>

#include "okpf/error.hpp"

namespace okpf {

void PhysParams::validate() const {
  auto pos = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!pos(zeta) || !pos(gamma) || !pos(mass) || !pos(epsilon) || !pos(K1) || !pos(K2))
    throw Error(Errc::invalid_argument, "zeta, gamma, mass, epsilon, K1, K2 must be positive");
  if (!(v_reg >= 0.0) || !std::isfinite(v_reg))
    throw Error(Errc::invalid_argument, "v_reg must be nonnegative");
}

double interpolant(double z, Interpolant kind) {
  if (kind == Interpolant::identity) return z;
  return z * z * (3.0 - 2.0 * z);
}

double interpolant_deriv(double z, Interpolant kind) {
  if (kind == Interpolant::identity) return 1.0;
  return 6.0 * z * (1.0 - z);
}

double potential_W(double u, double v) {
  const double q = u - u * u;
  const double a = std::min(v, 0.0);
  const double b = std::min(1.0 - v, 0.0);
  const double c = std::min(1.0 - u - v, 0.0);
  return 18.0 * q * q + 13.5 * (a * a + b * b + c * c);
}

std::pair<double, double> potential_W_grad(double u, double v) {
  const double a = std::min(v, 0.0);
  const double b = std::min(1.0 - v, 0.0);
  const double c = std::min(1.0 - u - v, 0.0);
  const double wu = 36.0 * (u - u * u) * (1.0 - 2.0 * u) - 27.0 * c;
  const double wv = 27.0 * (a - b - c);
  return {wu, wv};
}

Field apply_interpolant(const Field& f, Interpolant kind) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = interpolant(f[i], kind);
  return out;
}

Field charge_density(const Field& u, const Field& v, const PhysParams& p) {
  require_same_grid(u, v);
  Field w(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    w[i] = interpolant(u[i], p.interp) - interpolant(v[i], p.interp) / p.zeta;
  return w;
}

namespace {

double w_integral(const Field& u, const Field& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += potential_W(u[i], v[i]);
  return s * u.grid.cell_volume();
}

double mass_of(const Field& f, Interpolant kind) {
  double s = 0.0;
  for (double x : f.values) s += interpolant(x, kind);
  return s * f.grid.cell_volume();
}

// ½∫|∇φ|² with -Δφ = w, straight from ŵ
double half_inverse_dirichlet(const Spectral& sp, const std::vector<std::complex<double>>& wc) {
  const auto& k2 = sp.k2();
  const auto& wt = sp.weight();
  double s = 0.0;
  for (std::size_t i = 1; i < wc.size(); ++i) s += wt[i] * std::norm(wc[i]) / k2[i];
  return 0.5 * s * sp.grid().cell_volume() / static_cast<double>(sp.grid().size());
}

void check_pair(const Field& u, const Field& v) {
  require_same_grid(u, v);
  require_finite(u, "u");
  require_finite(v, "v");
}

}  // namespace

double perimeter_term(const Field& u, const Field& v, const PhysParams& p) {
  check_pair(u, v);
  return 0.5 * p.epsilon * dirichlet_energy(u) + w_integral(u, v) / p.epsilon;
}

Nonlocal nonlocal_term(const Field& u, const Field& v, const PhysParams& p) {
  check_pair(u, v);
  Field w = charge_density(u, v, p);
  Nonlocal out;
  out.phi = poisson_solve(w);
  out.value = 0.5 * dirichlet_energy(out.phi);
  return out;
}

double constraint_term(const Field& u, const Field& v, const PhysParams& p) {
  check_pair(u, v);
  const double du = p.mass - mass_of(u, p.interp);
  const double dv = p.zeta * p.mass - mass_of(v, p.interp);
  return 0.5 * p.K1 * du * du + 0.5 * p.K2 * dv * dv;
}

EnergyBreakdown total_energy(const Field& u, const Field& v, const PhysParams& p) {
  check_pair(u, v);
  Spectral sp(u.grid);
  EnergyBreakdown e;
  const double grad_u = sp.dirichlet(sp.forward(u));
  const double grad_v = sp.dirichlet(sp.forward(v));
  e.perimeter = 0.5 * p.epsilon * grad_u + w_integral(u, v) / p.epsilon;
  e.nonlocal = half_inverse_dirichlet(sp, sp.forward(charge_density(u, v, p)));
  e.constraint = constraint_term(u, v, p);
  e.v_regularization = p.v_reg * grad_v;
  e.total = e.perimeter + p.gamma * e.nonlocal + e.constraint + e.v_regularization;
  return e;
}

Derivatives variational_derivatives(const Field& u, const Field& v, const PhysParams& p) {
  check_pair(u, v);
  const Field phi = nonlocal_term(u, v, p).phi;
  const Field lap_u = laplacian(u);
  const Field lap_v = laplacian(v);
  const double ru = p.K1 * (p.mass - mass_of(u, p.interp));
  const double rv = p.K2 * (p.zeta * p.mass - mass_of(v, p.interp));
  Derivatives d{Field(u.grid), Field(u.grid)};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [wu, wv] = potential_W_grad(u[i], v[i]);
    const double fu = interpolant_deriv(u[i], p.interp);
    const double fv = interpolant_deriv(v[i], p.interp);
    d.du[i] = -p.epsilon * lap_u[i] + wu / p.epsilon + p.gamma * phi[i] * fu - ru * fu;
    d.dv[i] = wv / p.epsilon - (p.gamma / p.zeta) * phi[i] * fv - rv * fv - 2.0 * p.v_reg * lap_v[i];
  }
  return d;
}

}  // namespace okpf
