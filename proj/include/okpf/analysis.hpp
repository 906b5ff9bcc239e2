#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "okpf/grid.hpp"

namespace okpf {

struct FitResult {
  double a = 0.0;  // asymptote
  double b = 0.0;
  double p = 0.0;  // decay exponent
  double rms_residual = 0.0;
};

// ratio = a + b m^-p; free p is searched on [0.25, 3]
FitResult fit_energy_mass(const std::vector<std::pair<double, double>>& points,
                          std::optional<double> fix_p = std::nullopt);

// Per-axis dipole ∫(x - L/2) m(x) dx of the trigonometric interpolant of the
// axis marginal m; the Nyquist mode is left out.
std::array<double, 3> dipole_moment(const Field& w);

struct DipoleShift {
  // physical shift t in [0, L) per axis; shifted(x) = w(x + t)
  std::array<double, 3> shift{0.0, 0.0, 0.0};
  Field shifted;
  // the marginal dipole is identically zero on this axis, so any shift works
  std::array<bool, 3> flat{false, false, false};
};

// shifted(x) = f(x + t) through a Fourier phase; Nyquist modes get cos(k t)
Field fourier_shift(const Field& f, const std::array<double, 3>& t);

// requires |∫w| <= 1e-10 ∫|w|
DipoleShift zero_dipole_shift(const Field& w);

struct Ray {
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> direction{1.0, 0.0, 0.0};
  double length = 0.0;
};

struct ThicknessProfile {
  // arc lengths of the level crossings of u and of u+v, sorted
  std::vector<double> crossings;
  // consecutive differences of the crossings
  std::vector<double> intervals;
};

// Periodic multilinear sampling along the ray at an eighth of the finest spacing.
ThicknessProfile measure_thickness(const Field& u, const Field& v, const Ray& ray,
                                   double level = 0.5);

}  // namespace okpf
