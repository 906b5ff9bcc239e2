#pragma once

#include <array>
#include <string>

namespace okpf::radial {

enum class Kind { liposome, micelle };

// Concentric V|U|V shell, R0 <= R1 < R2 < R3; R0 = R1 = 0 is a micelle.
struct RadialCandidate {
  int n = 3;
  double zeta = 1.0;
  double r0 = 0.0, r1 = 0.0, r2 = 0.0, r3 = 0.0;

  Kind kind() const { return (r0 == 0.0 && r1 == 0.0) ? Kind::micelle : Kind::liposome; }
  // mass m implied by the U layer
  double mass() const;
  // throws Errc::invalid_candidate when the ordering or the charge balance fails
  void validate(double rel_tol = 1e-10) const;

  static RadialCandidate from_inner(int n, double zeta, double m, double r1, double t01);
  static RadialCandidate micelle(int n, double zeta, double m);
};

struct RadialEnergy {
  double perimeter = 0.0;
  double nonlocal = 0.0;
  double total = 0.0;
};

// Shell with layer thicknesses carried explicitly so large radii lose no digits.
struct Shell {
  int n = 3;
  double zeta = 1.0;
  double r1 = 0.0;
  double t01 = 0.0, t12 = 0.0, t23 = 0.0;

  double r0() const { return r1 - t01; }
  double r2() const { return r1 + t12; }
  double r3() const { return r1 + t12 + t23; }
  RadialCandidate candidate() const;
  static Shell of(const RadialCandidate& c);
};

double perimeter(const Shell& s);
// N by piecewise Gauss-Legendre on the enclosed-charge form
double nonlocal(const Shell& s);
RadialEnergy shell_energy(const Shell& s, double gamma);

RadialEnergy liposome_energy(const RadialCandidate& c, double gamma);
// the polynomial / logarithmic closed forms, fine for moderate radii only
double nonlocal_closed_form(const RadialCandidate& c);

double radial_potential(const RadialCandidate& c, double r);
// ∫φ·(1_U - 1_V/ζ) over the shell, by radial quadrature; equals 2N
double potential_charge_integral(const RadialCandidate& c);

double micelle_energy(double m, double zeta, double gamma, int n);
struct MicelleOptimum {
  double m_star = 0.0;
  double min_energy_per_mass = 0.0;
};
MicelleOptimum micelle_optimal(double zeta, double gamma, int n);

// relative residuals of the two Lagrange conditions
std::array<double, 2> stationarity_residual(const RadialCandidate& c, double gamma);
std::array<double, 2> stationarity_residual(const Shell& s, double gamma);

struct LiposomeOptimum {
  Shell shell;
  RadialCandidate candidate;
  RadialEnergy energy;
  double mass = 0.0;
  // free: stationarity_residual; equal mass: {dE/dR1 / dP/dR1, 0}
  std::array<double, 2> residual{0.0, 0.0};
};
LiposomeOptimum optimize_liposome(double m, double zeta, double gamma, int n, bool equal_mass);

struct AsymptoticPrediction {
  double energy_per_mass = 0.0;
  double leading = 0.0;
  double correction = 0.0;
  double t01 = 0.0, t12 = 0.0, t23 = 0.0;
  double mid_radius = 0.0;
  double shell_mass_imbalance = 0.0;
  // neglected remainder of energy_per_mass is O(m^-remainder_order)
  double remainder_order = 0.0;
};
AsymptoticPrediction asymptotic_liposome(double m, double zeta, double gamma, int n,
                                         bool equal_mass);

struct RescaleParams {
  double rho = 1.0;
  int d = 1;
};
// F_ρ through the dilation identity
double rescaled_energy(const RadialCandidate& c, const RescaleParams& rp, double gamma = 1.0);
// F_ρ straight from the definition
double rescaled_energy_direct(const RadialCandidate& c, const RescaleParams& rp,
                              double gamma = 1.0);

enum class Branch { bilayer, cylinder, sphere };
std::string to_string(Branch b);

struct MorphologyBranches {
  double zeta0 = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  static double bilayer(double zeta);
  static double cylinder(double zeta);
  static double sphere(double zeta);
};
MorphologyBranches thresholds();

struct Morphology {
  double c = 0.0;
  Branch branch = Branch::bilayer;
  // ζ <= ζ0: outside the range where the three branches are conjectured to cover it
  bool below_zeta0 = false;
};
Morphology morphology(double zeta);

struct HelfrichModuli {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};
HelfrichModuli helfrich_moduli(double zeta);

struct LayerThickness {
  double inner = 0.0;
  double outer = 0.0;
};
// V-layer thicknesses for the 1-Wasserstein sibling model; eps*|kappa| < 1/3
LayerThickness wasserstein_thickness(double eps, double kappa, bool equal_mass);
LayerThickness wasserstein_series(double eps, double kappa, bool equal_mass);

}  // namespace okpf::radial
