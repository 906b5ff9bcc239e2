#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "okpf/error.hpp"
#include "okpf/radial.hpp"

namespace okpf::radial {

namespace {

void check_zeta(double zeta) {
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw Error(Errc::invalid_argument, "zeta must be positive");
}

double bisect(double (*f)(double), double lo, double hi) {
  auto r = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(50));
  return 0.5 * (r.first + r.second);
}

// ζ + ζ²/3 = (ζ+1)ln(ζ+1)
double zeta1_eq(double z) { return z + z * z / 3.0 - (z + 1.0) * std::log1p(z); }

// 5((ζ+1)ln(ζ+1) - ζ) = 9(2ζ - 3(ζ+1)^{2/3} + 3)
double zeta2_eq(double z) {
  return 5.0 * ((z + 1.0) * std::log1p(z) - z) - 9.0 * (2.0 * z - 3.0 * std::pow(z + 1.0, 2.0 / 3.0) + 3.0);
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::bilayer: return "bilayer";
    case Branch::cylinder: return "cylinder";
    case Branch::sphere: return "sphere";
  }
  return "?";
}

double MorphologyBranches::bilayer(double zeta) {
  check_zeta(zeta);
  return std::cbrt(9.0 * (zeta + 1.0) / 8.0);
}

double MorphologyBranches::cylinder(double zeta) {
  check_zeta(zeta);
  const double z1 = zeta + 1.0;
  return 1.5 * std::cbrt(z1 * (z1 * std::log1p(zeta) - zeta) / (zeta * zeta));
}

double MorphologyBranches::sphere(double zeta) {
  check_zeta(zeta);
  const double z1 = zeta + 1.0;
  return 4.5 * std::cbrt(z1 * (2.0 * zeta + 3.0 - 3.0 * std::pow(z1, 2.0 / 3.0)) / (15.0 * zeta * zeta));
}

MorphologyBranches thresholds() {
  MorphologyBranches b;
  b.zeta0 = 2.0 * (std::sqrt(2.0) - 1.0);
  b.zeta1 = bisect(&zeta1_eq, 1.0, 3.0);
  b.zeta2 = bisect(&zeta2_eq, 2.5, 6.0);
  return b;
}

Morphology morphology(double zeta) {
  check_zeta(zeta);
  static const MorphologyBranches th = thresholds();
  Morphology m;
  m.below_zeta0 = zeta <= th.zeta0;
  if (zeta <= th.zeta1) {
    m.branch = Branch::bilayer;
    m.c = MorphologyBranches::bilayer(zeta);
  } else if (zeta <= th.zeta2) {
    m.branch = Branch::cylinder;
    m.c = MorphologyBranches::cylinder(zeta);
  } else {
    m.branch = Branch::sphere;
    m.c = MorphologyBranches::sphere(zeta);
  }
  return m;
}

HelfrichModuli helfrich_moduli(double zeta) {
  check_zeta(zeta);
  const double s = std::pow((zeta + 1.0) / 3.0, 2.0 / 3.0);
  HelfrichModuli h;
  h.lambda1 = 4.0 / 15.0 * (1.0 + 4.0 * zeta + zeta * zeta) / s;
  h.lambda2 = (4.0 - 4.0 * zeta - zeta * zeta) / (5.0 * s);
  return h;
}

LayerThickness wasserstein_thickness(double eps, double kappa, bool equal_mass) {
  if (!(eps > 0.0) || !std::isfinite(eps) || !std::isfinite(kappa))
    throw Error(Errc::out_of_range, "eps must be positive and kappa finite");
  const double x = eps * std::abs(kappa);
  if (!(x < 1.0 / 3.0)) throw Error(Errc::out_of_range, "eps*|kappa| must be below 1/3");
  LayerThickness t;
  if (!equal_mass) {
    // (1/|κ| ∓ ε)(±(1 - √(3 - 2/(1 ∓ ε|κ|)))) rationalised so κ → 0 is harmless
    t.inner = 2.0 * eps / (1.0 + std::sqrt(3.0 - 2.0 / (1.0 - x)));
    t.outer = 2.0 * eps / (1.0 + std::sqrt(3.0 - 2.0 / (1.0 + x)));
    return t;
  }
  // each V layer carries ε times the midline length
  const double a = (1.0 - x) * (1.0 - x) - 2.0 * x;
  if (!(a >= 0.0)) throw Error(Errc::out_of_range, "equal-mass inner layer does not fit: eps*|kappa| > 2 - sqrt(3)");
  t.inner = 2.0 * eps / ((1.0 - x) + std::sqrt(a));
  t.outer = 2.0 * eps / ((1.0 + x) + std::sqrt((1.0 + x) * (1.0 + x) + 2.0 * x));
  return t;
}

LayerThickness wasserstein_series(double eps, double kappa, bool equal_mass) {
  const double c = (equal_mass ? 1.5 : 0.5) * std::abs(kappa) * eps * eps;
  return {eps + c, eps - c};
}

}  // namespace okpf::radial
