#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "okpf/grid.hpp"
#include "okpf/radial.hpp"

namespace okpf {

using Vec3 = std::array<double, 3>;

namespace shape {
// U is the solid ball (micelle core)
struct Ball {
  Vec3 center{};
  double radius = 0.0;
  bool operator==(const Ball&) const = default;
};
// U is the spherical (circular in 2-D) shell between the radii
struct Shell {
  Vec3 center{};
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  bool operator==(const Shell&) const = default;
};
// flat midsurface with normal `normal`; radius <= 0 or infinite means an unbounded slab
struct Disk {
  Vec3 center{};
  Vec3 normal{1.0, 0.0, 0.0};
  double radius = 0.0;
  bool operator==(const Disk&) const = default;
};
// 3-D only; deform stretches the major circle along x
struct Torus {
  Vec3 center{};
  double major_radius = 0.0;
  double minor_radius = 0.0;
  double deform = 1.0;
  bool operator==(const Torus&) const = default;
};
// sin X cos Y + sin Y cos Z + sin Z cos X = level, X = 2πx/scale
struct Gyroid {
  double level = 0.0;
  double scale = 1.0;
  bool operator==(const Gyroid&) const = default;
};
// closed 2-D polyline midsurface
struct Curve {
  std::vector<std::array<double, 2>> points;
  bool operator==(const Curve&) const = default;
};
}  // namespace shape

using ShapeSpec = std::variant<shape::Ball, shape::Shell, shape::Disk, shape::Torus, shape::Gyroid, shape::Curve>;

struct BilayerSpec {
  ShapeSpec shape = shape::Ball{};
  double u_half_thickness = 0.1;
  // per side; unset means zeta * u_half_thickness
  std::optional<double> v_thickness;
  double epsilon = 0.05;
  bool operator==(const BilayerSpec&) const = default;
};

double tanh_profile(double signed_distance, double epsilon);

struct FieldPair {
  Field u;
  Field v;
};

// Distances use the minimum-image convention, so shapes crossing the box edge wrap.
FieldPair build_bilayer(const BilayerSpec& spec, const GridSpec& grid, double zeta = 1.0);

// Sharp-interface radial candidate smoothed with the tanh profile.
FieldPair build_radial(const radial::RadialCandidate& c, const Vec3& center, const GridSpec& grid,
                       double epsilon);

FieldPair perforate(const Field& u, const Field& v, const Vec3& hole_center, double hole_radius,
                    double epsilon);

// scales to the target plain integral, then clamps to [0, 1.1]
Field mass_rescale(const Field& f, double target_mass);

// Closed Fourier curve r(θ) = r0 (1 + Σ a_k cos kθ + b_k sin kθ), coefficients
// uniform in ±amplitude/k.
std::vector<std::array<double, 2>> random_curve(const std::array<double, 2>& center, double base_radius,
                                                int harmonics, double amplitude, std::uint64_t seed,
                                                int samples = 256);

// uniform additive noise in ±amplitude
void add_noise(Field& f, double amplitude, std::uint64_t seed);

}  // namespace okpf
