#include "okpf/radial.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "okpf/error.hpp"

namespace okpf::radial {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

void check_n(int n) {
  if (n != 2 && n != 3) throw Error(Errc::invalid_argument, "dimension n must be 2 or 3");
}

void check_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(Errc::invalid_argument, std::string(name) + " must be positive and finite");
}

// U-layer volume per unit charge: R2^n - R1^n
double unit_mass(int n, double m) { return n == 2 ? m / pi : 3.0 * m / (4.0 * pi); }

double omega(int n) { return n == 2 ? 2.0 * pi : 4.0 * pi; }

// (a^n - b^n)/(a - b)
double pow_sum(int n, double a, double b) { return n == 2 ? a + b : a * a + a * b + b * b; }

double powi(double x, int n) { return n == 2 ? x * x : x * x * x; }

double root_n(double x, int n) { return n == 2 ? std::sqrt(x) : std::cbrt(x); }

// 20-point Gauss-Legendre of f(r, offset) over the layer [a, b] of exact thickness
// len; the offset is measured from a, or back from b when from_right. Carrying len
// separately keeps thin layers at large radii from losing digits to b - a.
// Intervals that do not reach 0 are split geometrically so 1/r stays well resolved.
template <class F>
double integrate_piece(double a, double b, double len, bool from_right, F f) {
  if (!(len > 0.0)) return 0.0;
  using G = boost::math::quadrature::gauss<double, 20>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  double total = 0.0;
  auto segment = [&](double olo, double ohi) {
    const double c = 0.5 * (olo + ohi), h = 0.5 * (ohi - olo);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int sgn : {-1, 1}) {
        if (x[i] == 0.0 && sgn == 1) continue;
        const double off = c + sgn * h * x[i];
        const double r = from_right ? b - off : a + off;
        s += w[i] * f(r, off);
      }
    }
    total += s * h;
  };
  std::vector<double> cuts{0.0};
  if (a > 0.0)
    for (double r = 2.0 * a; r < b; r *= 2.0) cuts.push_back(from_right ? b - r : r - a);
  cuts.push_back(len);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) segment(cuts[k], cuts[k + 1]);
  return total;
}

// Enclosed charge q(r) = ∫_0^r s^{n-1} ρ(s) ds on each layer, with ρ = 1 in U and
// -1/ζ in V, written through offsets so no large radii get subtracted.
struct Charge {
  const Shell& s;
  int n;
  double R0, R1, R2, R3, q01;
  explicit Charge(const Shell& sh)
      : s(sh), n(sh.n), R0(sh.r0()), R1(sh.r1), R2(sh.r2()), R3(sh.r3()) {
    q01 = s.t01 * pow_sum(n, R1, R0) / (n * s.zeta);
  }
  double inner_v(double r, double off) const { return -off * pow_sum(n, r, R0) / (n * s.zeta); }
  double u_layer(double r, double off) const { return -q01 + off * pow_sum(n, r, R1) / n; }
  double outer_v(double r, double off) const { return off * pow_sum(n, R3, r) / (n * s.zeta); }
  double rn1(double r) const { return n == 2 ? r : r * r; }

  // ∫ q^2 / r^{n-1}
  template <class Q>
  double squared(double a, double b, double len, bool right, Q q) const {
    return integrate_piece(a, b, len, right, [&](double r, double off) {
      const double v = (this->*q)(r, off);
      return r > 0.0 ? v * v / rn1(r) : 0.0;
    });
  }
  double field_energy() const {
    return squared(R0, R1, s.t01, false, &Charge::inner_v) + squared(R1, R2, s.t12, false, &Charge::u_layer) +
           squared(R2, R3, s.t23, true, &Charge::outer_v);
  }
  // ∫ q / r^{n-1} over one layer
  template <class Q>
  double drop(double a, double b, double len, bool right, Q q) const {
    return integrate_piece(a, b, len, right, [&](double r, double off) {
      return r > 0.0 ? (this->*q)(r, off) / rn1(r) : 0.0;
    });
  }
  // φ(R0) - φ(R3)
  double d03() const {
    return drop(R0, R1, s.t01, false, &Charge::inner_v) + drop(R1, R2, s.t12, false, &Charge::u_layer) +
           drop(R2, R3, s.t23, true, &Charge::outer_v);
  }
  // φ(R2) - φ(R1)
  double d12() const { return -drop(R1, R2, s.t12, false, &Charge::u_layer); }
};

double dper_dr1(const Shell& s) {
  const double R2 = s.r2();
  return s.n == 2 ? 2.0 * pi * (1.0 + s.r1 / R2) : 8.0 * pi * (s.r1 + s.r1 * s.r1 / R2);
}

// x - log1p(x) without cancellation for small x
double x_minus_log1p(double x) {
  if (std::abs(x) < 1e-3) {
    double term = x, s = 0.0;
    for (int k = 2; k <= 9; ++k) {
      term *= -x;
      s -= term / k;
    }
    return s;
  }
  return x - std::log1p(x);
}

double clog(double c, double r) { return c == 0.0 ? 0.0 : c * std::log(r); }

}  // namespace

double RadialCandidate::mass() const {
  check_n(n);
  return n == 2 ? pi * (r2 - r1) * (r2 + r1) : 4.0 * pi / 3.0 * (r2 - r1) * pow_sum(3, r2, r1);
}

void RadialCandidate::validate(double rel_tol) const {
  check_n(n);
  auto bad = [](const std::string& m) { throw Error(Errc::invalid_candidate, m); };
  if (!(zeta > 0.0) || !std::isfinite(zeta)) bad("zeta must be positive");
  if (!(r0 >= 0.0 && r0 <= r1 && r1 < r2 && r2 < r3) || !std::isfinite(r3))
    bad("radii must satisfy 0 <= R0 <= R1 < R2 < R3");
  if (r0 == 0.0 && r1 > 0.0) bad("candidates with R0 = 0 < R1 are not supported");
  if (r0 > 0.0 && r0 == r1) bad("liposome needs R0 < R1");
  const double lhs = powi(r3, n) - powi(r0, n);
  const double rhs = (zeta + 1.0) * (powi(r2, n) - powi(r1, n));
  const double scale = std::max({powi(r3, n), (zeta + 1.0) * powi(r2, n), 1e-300});
  if (std::abs(lhs - rhs) > rel_tol * scale) {
    std::ostringstream os;
    os << "charge balance violated: R3^n-R0^n = " << lhs << ", (zeta+1)(R2^n-R1^n) = " << rhs;
    bad(os.str());
  }
}

Shell Shell::of(const RadialCandidate& c) {
  Shell s;
  s.n = c.n;
  s.zeta = c.zeta;
  s.r1 = c.r1;
  s.t01 = c.r1 - c.r0;
  s.t12 = c.r2 - c.r1;
  s.t23 = c.r3 - c.r2;
  return s;
}

RadialCandidate Shell::candidate() const {
  RadialCandidate c;
  c.n = n;
  c.zeta = zeta;
  c.r1 = r1;
  c.r0 = t01 == r1 ? 0.0 : r1 - t01;
  c.r2 = r2();
  c.r3 = r3();
  return c;
}

namespace {

// Free family: (r1, t01) -> shell; false when the layers would invert.
bool free_shell(int n, double zeta, double M, double r1, double t01, Shell& s) {
  if (!(r1 > 0.0) || !(t01 > 0.0) || !(t01 < r1)) return false;
  s.n = n;
  s.zeta = zeta;
  s.r1 = r1;
  s.t01 = t01;
  const double R2 = root_n(powi(r1, n) + M, n);
  s.t12 = M / pow_sum(n, R2, r1);
  const double R0 = r1 - t01;
  const double R3 = root_n(powi(R0, n) + (zeta + 1.0) * M, n);
  const double t03 = (zeta + 1.0) * M / pow_sum(n, R3, R0);
  s.t23 = t03 - t01 - s.t12;
  return s.t23 > 0.0 && std::isfinite(s.t23);
}

// Equal-mass family: inner and outer V layers each hold ζM/2.
bool equal_shell(int n, double zeta, double M, double r1, Shell& s) {
  const double half = 0.5 * zeta * M;
  const double r1n = powi(r1, n);
  if (!(r1 > 0.0) || !(r1n > half)) return false;
  s.n = n;
  s.zeta = zeta;
  s.r1 = r1;
  const double R0 = root_n(r1n - half, n);
  s.t01 = half / pow_sum(n, r1, R0);
  const double R2 = root_n(r1n + M, n);
  s.t12 = M / pow_sum(n, R2, r1);
  const double R3 = root_n(powi(R2, n) + half, n);
  s.t23 = half / pow_sum(n, R3, R2);
  return std::isfinite(s.t23) && s.t01 > 0.0;
}

}  // namespace

double perimeter(const Shell& s) {
  const double R2 = s.r2();
  return s.n == 2 ? 2.0 * pi * (s.r1 + R2) : 4.0 * pi * (s.r1 * s.r1 + R2 * R2);
}

double nonlocal(const Shell& s) { return 0.5 * omega(s.n) * Charge(s).field_energy(); }

RadialEnergy shell_energy(const Shell& s, double gamma) {
  RadialEnergy e;
  e.perimeter = perimeter(s);
  e.nonlocal = nonlocal(s);
  e.total = e.perimeter + gamma * e.nonlocal;
  return e;
}

RadialEnergy liposome_energy(const RadialCandidate& c, double gamma) {
  c.validate();
  return shell_energy(Shell::of(c), gamma);
}

double nonlocal_closed_form(const RadialCandidate& c) {
  c.validate();
  const double z = c.zeta, R0 = c.r0, R1 = c.r1, R2 = c.r2, R3 = c.r3;
  if (c.n == 3) {
    const double s = 6.0 * (std::pow(R0, 5) - std::pow(R3, 5)) +
                     (z + 1.0) * (10.0 * R2 * R2 * std::pow(R3, 3) - (6.0 * z + 4.0) * std::pow(R2, 5) +
                                  (6.0 * z + 4.0) * std::pow(R1, 5) - 10.0 * std::pow(R0, 3) * R1 * R1);
    return pi * s / (15.0 * z * z);
  }
  auto r4l = [](double R) { return R > 0.0 ? std::pow(R, 4) * std::log(R) : 0.0; };
  auto lg = [](double R) { return R > 0.0 ? std::log(R) : 0.0; };
  const double s =
      (1.0 - z * z) * (std::pow(R2, 4) - std::pow(R1, 4)) + std::pow(R0, 4) - std::pow(R3, 4) +
      4.0 * (r4l(R3) - r4l(R0) +
             (z + 1.0) * (2.0 * R0 * R0 * R1 * R1 - (z + 1.0) * std::pow(R1, 4)) * lg(R1) -
             (z + 1.0) * (2.0 * R3 * R3 * R2 * R2 - (z + 1.0) * std::pow(R2, 4)) * lg(R2));
  return pi * s / (16.0 * z * z);
}

double radial_potential(const RadialCandidate& c, double r) {
  check_n(c.n);
  if (!(r >= 0.0)) throw Error(Errc::invalid_argument, "radius must be nonnegative");
  const double z = c.zeta, R0 = c.r0, R1 = c.r1, R2 = c.r2, R3 = c.r3;
  if (r >= R3) return 0.0;
  if (c.n == 2) {
    auto L = [](double R) { return R > 0.0 ? R * R * std::log(R) : 0.0; };
    const double a3 = 2.0 * (L(R3) - (z + 1.0) * L(R2));
    double v;
    if (r >= R2)
      v = 2.0 * L(R3) - R3 * R3 + r * r - clog(2.0 * R3 * R3, r);
    else if (r >= R1)
      v = a3 - R3 * R3 + (z + 1.0) * R2 * R2 - z * r * r - clog(2.0 * (R3 * R3 - (z + 1.0) * R2 * R2), r);
    else if (r >= R0)
      v = a3 + 2.0 * (z + 1.0) * L(R1) - R0 * R0 + r * r - clog(2.0 * R0 * R0, r);
    else
      v = a3 + 2.0 * ((z + 1.0) * L(R1) - L(R0));
    return v / (4.0 * z);
  }
  const double R3s = R3 * R3, R2s = R2 * R2, R1s = R1 * R1;
  double v;
  if (r >= R2)
    v = -3.0 * R3s + 2.0 * R3s * R3 / r + r * r;
  else if (r >= R1) {
    const double c3 = R3s * R3 - (z + 1.0) * R2s * R2;
    v = -3.0 * (R3s - (z + 1.0) * R2s) + (c3 == 0.0 ? 0.0 : 2.0 * c3 / r) - z * r * r;
  } else if (r >= R0)
    v = -3.0 * (R3s - (z + 1.0) * R2s + (z + 1.0) * R1s) + (R0 == 0.0 ? 0.0 : 2.0 * R0 * R0 * R0 / r) + r * r;
  else
    v = -3.0 * (R3s - (z + 1.0) * R2s + (z + 1.0) * R1s - R0 * R0);
  return v / (6.0 * z);
}

double potential_charge_integral(const RadialCandidate& c) {
  c.validate();
  const int n = c.n;
  auto piece = [&](double a, double b, double rho) {
    return integrate_piece(a, b, b - a, false, [&](double r, double) {
      return omega(n) * (n == 2 ? r : r * r) * radial_potential(c, r) * rho;
    });
  };
  return piece(c.r0, c.r1, -1.0 / c.zeta) + piece(c.r1, c.r2, 1.0) + piece(c.r2, c.r3, -1.0 / c.zeta);
}

double micelle_energy(double m, double zeta, double gamma, int n) {
  check_n(n);
  check_positive(m, "m");
  check_positive(zeta, "zeta");
  check_positive(gamma, "gamma");
  const double z1 = zeta + 1.0;
  if (n == 2) {
    const double per = 2.0 * pi * std::sqrt(m / pi);
    const double N = pi / (zeta * zeta) * z1 * (z1 * std::log(z1) - zeta) * (m / pi) * (m / pi) / 8.0;
    return per + gamma * N;
  }
  const double M = 3.0 * m / (4.0 * pi);
  const double per = 4.0 * pi * std::pow(M, 2.0 / 3.0);
  const double N = pi / (zeta * zeta) * z1 * (4.0 * zeta + 6.0 - 6.0 * std::pow(z1, 2.0 / 3.0)) *
                   std::pow(M, 5.0 / 3.0) / 15.0;
  return per + gamma * N;
}

MicelleOptimum micelle_optimal(double zeta, double gamma, int n) {
  check_n(n);
  check_positive(zeta, "zeta");
  check_positive(gamma, "gamma");
  const double z1 = zeta + 1.0;
  MicelleOptimum o;
  if (n == 2) {
    const double a = gamma * z1 * (z1 * std::log(z1) - zeta) / (zeta * zeta);
    o.m_star = 4.0 * pi * std::pow(a, -2.0 / 3.0);
    o.min_energy_per_mass = 1.5 * std::cbrt(a);
    return o;
  }
  const double b = 2.0 * zeta + 3.0 - 3.0 * std::pow(z1, 2.0 / 3.0);
  o.m_star = 20.0 * pi * zeta * zeta / (gamma * z1) / b;
  o.min_energy_per_mass = 4.5 * std::cbrt(gamma * z1 * b / (15.0 * zeta * zeta));
  return o;
}

std::array<double, 2> stationarity_residual(const Shell& s, double gamma) {
  check_positive(gamma, "gamma");
  const double z = s.zeta;
  const double R0 = s.r0(), R1 = s.r1, R2 = s.r2(), R3 = s.r3();
  const double t03 = s.t01 + s.t12 + s.t23;
  auto rel = [](double diff, std::initializer_list<double> terms) {
    double sc = 0.0;
    for (double t : terms) sc = std::max(sc, std::abs(t));
    return sc > 0.0 ? diff / sc : diff;
  };
  std::array<double, 2> res{};
  if (s.n == 3) {
    const double a = t03 * (R3 + R0);
    const double b = (z + 1.0) * s.t12 * (R2 + R1);
    res[0] = rel(a - b, {a, b});
    const double lhs = 12.0 * z * z / gamma * (1.0 / R1 + 1.0 / R2);
    const double p = (3.0 * z + 2.0) * a;
    const double q0 = 2.0 * (z + 1.0) * R0 * R0 * R0 / R1;
    const double q3 = 2.0 * (z + 1.0) * R3 * R3 * R3 / R2;
    res[1] = rel(lhs - (p + q0 - q3), {lhs, p, q0, q3});
    return res;
  }
  // logs of radii scaled by the mid radius; the log-of-scale part cancels by charge balance
  const double sc = 0.5 * (R1 + R2);
  auto F = [](double d) { return 2.0 * (1.0 + d) * (1.0 + d) * std::log1p(d); };
  const double d1 = -s.t12 / (2.0 * sc), d2 = s.t12 / (2.0 * sc);
  const double d0 = d1 - s.t01 / sc, d3 = d2 + s.t23 / sc;
  const double f0 = F(d0), f1 = F(d1), f2 = F(d2), f3 = F(d3);
  res[0] = rel((f3 - f0) - (z + 1.0) * (f2 - f1), {f3, f0, (z + 1.0) * f2, (z + 1.0) * f1});
  const double lhs = 4.0 * z * z / ((z + 1.0) * gamma) * (1.0 / R1 + 1.0 / R2);
  const double x = s.t12 * (R1 + R2) / (R1 * R1);
  const double L = std::log1p(x);
  const double bend = z * R1 * R1 * x_minus_log1p(x);
  const double tail = s.t01 * (R1 + R0) * L;
  res[1] = rel(lhs - (bend - tail), {lhs, bend, tail});
  return res;
}

std::array<double, 2> stationarity_residual(const RadialCandidate& c, double gamma) {
  check_n(c.n);
  if (c.kind() != Kind::liposome) throw Error(Errc::invalid_candidate, "stationarity residual needs a liposome");
  return stationarity_residual(Shell::of(c), gamma);
}

AsymptoticPrediction asymptotic_liposome(double m, double zeta, double gamma, int n, bool equal_mass) {
  check_n(n);
  check_positive(m, "m");
  check_positive(zeta, "zeta");
  check_positive(gamma, "gamma");
  const double z = zeta, z1 = zeta + 1.0, g = gamma;
  AsymptoticPrediction a;
  a.leading = std::cbrt(g * z1 * 9.0 / 8.0);
  a.t12 = std::cbrt(24.0 / (g * z1));
  const double base = std::cbrt(3.0 * z * z * z / (g * z1));
  double corr;
  if (n == 2) {
    a.mid_radius = m / (4.0 * pi) * std::cbrt(g * z1 / 3.0);
    a.remainder_order = 3.0;
    if (!equal_mass) {
      a.correction = 8.0 * pi * pi / 5.0 * (z * z + 4.0 * z + 1.0) / (g * z1 * m * m);
      corr = 2.0 * pi * z * (z + 2.0) / (g * m * z1);
      a.shell_mass_imbalance = 4.0 * z * (z + 2.0) / std::cbrt(3.0 * (g * z1) * (g * z1));
    } else {
      a.correction = 24.0 * pi * pi * (2.0 * z * z + 8.0 * z + 7.0) / (5.0 * g * z1 * m * m);
      corr = 6.0 * pi * z * (z + 2.0) / (m * g * z1);
    }
  } else {
    a.mid_radius = std::pow(g * z1 / 3.0, 1.0 / 6.0) / (2.0 * std::sqrt(2.0 * pi / m));
    a.remainder_order = 1.5;
    const double s = std::pow(g * z1 / 3.0, 2.0 / 3.0);
    if (!equal_mass) {
      a.correction = 4.0 * pi / (15.0 * m) * (z * z + 4.0 * z + 16.0) / s;
      corr = (z + 2.0) * z * std::sqrt(8.0 * pi / m) / std::pow(3.0 * std::pow(g * z1, 5.0), 1.0 / 6.0);
      a.shell_mass_imbalance = std::sqrt(6.0 * m) * z * (z + 2.0) / std::sqrt(pi * g * z1);
    } else {
      a.correction = 4.0 * pi / (5.0 * m) * (7.0 * z * z + 28.0 * z + 32.0) / s;
      corr = z * (z + 2.0) * std::sqrt(8.0 * pi / m) / std::pow(g * z1 / 3.0, 5.0 / 6.0);
    }
  }
  a.t01 = base + corr;
  a.t23 = base - corr;
  a.energy_per_mass = a.leading + a.correction;
  return a;
}

namespace {

struct Gradient {
  double dr1 = 0.0, dt01 = 0.0;
};

Gradient free_gradient(const Shell& s, double gamma) {
  Charge q(s);
  const double w = omega(s.n);
  const double R0 = s.r0();
  const double d03 = q.d03(), d12 = q.d12();
  const double r0n1 = s.n == 2 ? R0 : R0 * R0;
  const double r1n1 = s.n == 2 ? s.r1 : s.r1 * s.r1;
  Gradient g;
  g.dt01 = -gamma * w * r0n1 * d03 / s.zeta;
  g.dr1 = dper_dr1(s) + gamma * w * (r0n1 * d03 / s.zeta + r1n1 * (1.0 + 1.0 / s.zeta) * d12);
  return g;
}

double equal_gradient(const Shell& s, double gamma) {
  Charge q(s);
  const double r1n1 = s.n == 2 ? s.r1 : s.r1 * s.r1;
  return dper_dr1(s) +
         gamma * omega(s.n) * r1n1 * (q.d03() / s.zeta + (1.0 + 1.0 / s.zeta) * q.d12());
}

struct NmCtx {
  int n;
  double zeta, gamma, M, r1s, t1s, e0;
};

double nm_objective(const gsl_vector* x, void* p) {
  const auto* c = static_cast<const NmCtx*>(p);
  Shell s;
  if (!free_shell(c->n, c->zeta, c->M, gsl_vector_get(x, 0) * c->r1s, gsl_vector_get(x, 1) * c->t1s, s))
    return inf;
  return shell_energy(s, c->gamma).total / c->e0;
}

[[noreturn]] void fail(const std::string& what, double m) {
  std::ostringstream os;
  os << "liposome optimizer did not converge at m = " << m << ": " << what;
  throw Error(Errc::optimizer, os.str());
}

LiposomeOptimum finish(const Shell& s, double m, double gamma) {
  LiposomeOptimum o;
  o.shell = s;
  o.candidate = s.candidate();
  o.energy = shell_energy(s, gamma);
  o.mass = m;
  o.residual = stationarity_residual(s, gamma);
  return o;
}

LiposomeOptimum optimize_free(double m, double zeta, double gamma, int n) {
  const double M = unit_mass(n, m);
  const auto guess = asymptotic_liposome(m, zeta, gamma, n, false);
  double t01 = std::max(guess.t01, 0.25 * std::cbrt(3.0 * zeta * zeta * zeta / (gamma * (zeta + 1.0))));
  double r1 = std::max(guess.mid_radius - 0.5 * guess.t12, 2.0 * t01);
  Shell s;
  for (int k = 0; k < 60 && !free_shell(n, zeta, M, r1, t01, s); ++k) r1 *= 1.5;
  if (!free_shell(n, zeta, M, r1, t01, s)) fail("no feasible starting shell", m);

  // derivative-free stage in scaled coordinates
  NmCtx ctx{n, zeta, gamma, M, r1, t01, shell_energy(s, gamma).total};
  gsl_multimin_function fn{&nm_objective, 2, &ctx};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, 1.0);
  gsl_vector_set(x, 1, 1.0);
  gsl_vector_set(step, 0, std::min(0.05, 0.5 * (1.0 - t01 / r1)));
  gsl_vector_set(step, 1, 0.05);
  gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(nm, &fn, x, step);
  for (int it = 0; it < 2000; ++it) {
    if (gsl_multimin_fminimizer_iterate(nm)) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm), 1e-9) == GSL_SUCCESS) break;
  }
  r1 = gsl_vector_get(nm->x, 0) * ctx.r1s;
  t01 = gsl_vector_get(nm->x, 1) * ctx.t1s;
  gsl_multimin_fminimizer_free(nm);
  gsl_vector_free(x);
  gsl_vector_free(step);
  if (!free_shell(n, zeta, M, r1, t01, s)) fail("simplex stage left the feasible set", m);

  // damped Newton on the exact gradient, Jacobian by central differences
  auto grad = [&](double a, double b, Gradient& g) {
    Shell sh;
    if (!free_shell(n, zeta, M, a, b, sh)) return false;
    g = free_gradient(sh, gamma);
    return true;
  };
  auto merit = [&](const Gradient& g, const Shell& sh) {
    const double s1 = dper_dr1(sh);
    const double R0 = sh.r0();
    const double s2 = gamma * omega(n) * (n == 2 ? R0 : R0 * R0) * sh.t01 * sh.t01 / (zeta * zeta);
    return std::hypot(g.dr1 / s1, g.dt01 / s2);
  };
  Gradient g;
  grad(r1, t01, g);
  double cur = merit(g, s);
  for (int it = 0; it < 80; ++it) {
    const double h1 = 1e-6 * std::max(r1 - t01, t01), h2 = 1e-6 * t01;
    Gradient a, b, c, d;
    if (!grad(r1 + h1, t01, a) || !grad(r1 - h1, t01, b) || !grad(r1, t01 + h2, c) ||
        !grad(r1, t01 - h2, d))
      fail("Newton stencil left the feasible set", m);
    const double j11 = (a.dr1 - b.dr1) / (2 * h1), j21 = (a.dt01 - b.dt01) / (2 * h1);
    const double j12 = (c.dr1 - d.dr1) / (2 * h2), j22 = (c.dt01 - d.dt01) / (2 * h2);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) fail("singular Jacobian", m);
    double dx = -(j22 * g.dr1 - j12 * g.dt01) / det;
    double dy = -(-j21 * g.dr1 + j11 * g.dt01) / det;
    double lam = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, lam *= 0.5) {
      Shell trial;
      Gradient gt;
      if (!free_shell(n, zeta, M, r1 + lam * dx, t01 + lam * dy, trial)) continue;
      gt = free_gradient(trial, gamma);
      const double mt = merit(gt, trial);
      if (mt < cur || (k > 30 && mt <= cur * (1 + 1e-12))) {
        r1 += lam * dx;
        t01 += lam * dy;
        s = trial;
        g = gt;
        moved = mt < cur;
        cur = mt;
        break;
      }
    }
    const double rel_step = std::max(std::abs(lam * dx) / r1, std::abs(lam * dy) / t01);
    if (!moved || rel_step < 1e-15 || cur < 1e-15) break;
  }
  auto o = finish(s, m, gamma);
  if (!(std::max(std::abs(o.residual[0]), std::abs(o.residual[1])) < 1e-8))
    fail("stationarity residual above 1e-8", m);
  return o;
}

LiposomeOptimum optimize_equal(double m, double zeta, double gamma, int n) {
  const double M = unit_mass(n, m);
  const double half = 0.5 * zeta * M;
  const double r_min = root_n(half, n) * (1.0 + 1e-12);
  const auto guess = asymptotic_liposome(m, zeta, gamma, n, true);
  double r_guess = std::max(guess.mid_radius - 0.5 * guess.t12, 1.01 * r_min);
  auto energy = [&](double r1) {
    Shell s;
    if (!equal_shell(n, zeta, M, r1, s)) return inf;
    return shell_energy(s, gamma).total;
  };
  double lo = std::max(r_min, 0.5 * r_guess), hi = 2.0 * r_guess + 1.0;
  std::uintmax_t iters = 500;
  auto best = boost::math::tools::brent_find_minima(energy, lo, hi, 52, iters);
  double r1 = best.first;
  if (lo == r_min && r1 - r_min <= 1e-6 * r_min) fail("no interior minimum, the energy decreases toward R0 = 0", m);
  auto g = [&](double r) {
    Shell s;
    if (!equal_shell(n, zeta, M, r, s)) return -inf;
    return equal_gradient(s, gamma);
  };
  // tighten with a bracketed root of dE/dr1
  double width = 1e-6 * r1;
  double a = std::max(r_min, r1 - width), b = r1 + width;
  double ga = g(a), gb = g(b);
  for (int k = 0; k < 40 && ga * gb > 0.0; ++k) {
    width *= 2.0;
    a = std::max(r_min, r1 - width);
    b = r1 + width;
    ga = g(a);
    gb = g(b);
  }
  if (ga * gb <= 0.0 && ga != gb) {
    std::uintmax_t it = 200;
    auto br = boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52), it);
    r1 = 0.5 * (br.first + br.second);
  } else {
    fail("no sign change of dE/dR1 around the Brent minimum", m);
  }
  Shell s;
  if (!equal_shell(n, zeta, M, r1, s)) fail("equal-mass shell infeasible", m);
  auto o = finish(s, m, gamma);
  o.residual = {equal_gradient(s, gamma) / dper_dr1(s), 0.0};
  if (!(std::abs(o.residual[0]) < 1e-8)) fail("dE/dR1 residual above 1e-8", m);
  return o;
}

}  // namespace

RadialCandidate RadialCandidate::from_inner(int n, double zeta, double m, double r1, double t01) {
  check_n(n);
  Shell s;
  if (!free_shell(n, zeta, unit_mass(n, m), r1, t01, s))
    throw Error(Errc::invalid_candidate, "radii ordering violated");
  return s.candidate();
}

RadialCandidate RadialCandidate::micelle(int n, double zeta, double m) {
  check_n(n);
  check_positive(m, "m");
  check_positive(zeta, "zeta");
  const double M = unit_mass(n, m);
  RadialCandidate c;
  c.n = n;
  c.zeta = zeta;
  c.r2 = root_n(M, n);
  c.r3 = root_n((zeta + 1.0) * M, n);
  return c;
}

LiposomeOptimum optimize_liposome(double m, double zeta, double gamma, int n, bool equal_mass) {
  check_n(n);
  check_positive(m, "m");
  check_positive(zeta, "zeta");
  check_positive(gamma, "gamma");
  return equal_mass ? optimize_equal(m, zeta, gamma, n) : optimize_free(m, zeta, gamma, n);
}

double rescaled_energy(const RadialCandidate& c, const RescaleParams& rp, double gamma) {
  c.validate();
  check_positive(rp.rho, "rho");
  if (rp.d < 1 || rp.d > 3) throw Error(Errc::invalid_argument, "d must be 1, 2 or 3");
  Shell s = Shell::of(c);
  s.r1 /= rp.rho;
  s.t01 /= rp.rho;
  s.t12 /= rp.rho;
  s.t23 /= rp.rho;
  return std::pow(rp.rho, c.n - rp.d) * shell_energy(s, gamma).total;
}

double rescaled_energy_direct(const RadialCandidate& c, const RescaleParams& rp, double gamma) {
  c.validate();
  check_positive(rp.rho, "rho");
  const auto e = shell_energy(Shell::of(c), 1.0);
  return std::pow(rp.rho, 1 - rp.d) * e.perimeter + gamma * std::pow(rp.rho, -2 - rp.d) * e.nonlocal;
}

}  // namespace okpf::radial
