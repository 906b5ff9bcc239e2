#pragma once

#include <utility>

#include "okpf/grid.hpp"

namespace okpf {

enum class Interpolant { cubic, identity };

struct PhysParams {
  double zeta = 1.0;
  double gamma = 1500.0;
  double mass = 1.0;
  double epsilon = 0.05;
  double K1 = 3.0e4;
  double K2 = 4800.0;
  double v_reg = default_v_reg(0.05);
  Interpolant interp = Interpolant::cubic;

  static double default_v_reg(double epsilon) { return 0.5 * epsilon / 1250000.0; }
  void validate() const;
  bool operator==(const PhysParams&) const = default;
};

struct EnergyBreakdown {
  double perimeter = 0.0;
  double nonlocal = 0.0;
  double constraint = 0.0;
  double v_regularization = 0.0;
  double total = 0.0;
};

double interpolant(double z, Interpolant kind = Interpolant::cubic);
double interpolant_deriv(double z, Interpolant kind = Interpolant::cubic);

double potential_W(double u, double v);
std::pair<double, double> potential_W_grad(double u, double v);

Field apply_interpolant(const Field& f, Interpolant kind);
// w = f(u) - f(v)/zeta
Field charge_density(const Field& u, const Field& v, const PhysParams& p);

double perimeter_term(const Field& u, const Field& v, const PhysParams& p);

struct Nonlocal {
  double value = 0.0;
  Field phi;
};
Nonlocal nonlocal_term(const Field& u, const Field& v, const PhysParams& p);

double constraint_term(const Field& u, const Field& v, const PhysParams& p);

EnergyBreakdown total_energy(const Field& u, const Field& v, const PhysParams& p);

struct Derivatives {
  Field du;
  Field dv;
};
Derivatives variational_derivatives(const Field& u, const Field& v, const PhysParams& p);

}  // namespace okpf
