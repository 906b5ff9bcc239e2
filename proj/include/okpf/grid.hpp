#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace okpf {

struct GridSpec {
  int dim = 2;
  std::array<int, 3> points{4, 4, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};

  static GridSpec square(int n, double length);
  static GridSpec cube(int n, double length);
  static GridSpec make(int dim, std::array<int, 3> points, std::array<double, 3> lengths);

  std::size_t size() const;
  double spacing(int axis) const { return lengths[axis] / points[axis]; }
  double cell_volume() const;
  double volume() const;
  // throws Errc::invalid_argument
  void validate() const;

  bool operator==(const GridSpec& o) const;
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct Field {
  GridSpec grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const GridSpec& g, double fill = 0.0);
  Field(const GridSpec& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(grid.points[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(grid.points[1]) * k);
  }
  double& at(int i, int j, int k = 0) { return values[index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return values[index(i, j, k)]; }
  double& operator[](std::size_t n) { return values[n]; }
  double operator[](std::size_t n) const { return values[n]; }
};

void require_finite(const Field& f, const char* name = "field");
void require_same_grid(const Field& a, const Field& b);

// Cached FFTW r2c/c2r plans for one grid shape. Owns scratch buffers, so an
// instance must not be shared between threads; create one per thread.
class Spectral {
 public:
  explicit Spectral(const GridSpec& g);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const GridSpec& grid() const { return grid_; }
  std::size_t modes() const { return k2_.size(); }
  // |k|^2 per half-spectrum mode
  const std::vector<double>& k2() const { return k2_; }
  // Hermitian multiplicity (1 or 2) per half-spectrum mode
  const std::vector<double>& weight() const { return weight_; }

  void forward(const double* in, std::complex<double>* out);
  // unnormalized inverse is divided by the sample count here
  void inverse(const std::complex<double>* in, double* out);

  std::vector<std::complex<double>> forward(const Field& f);
  Field inverse(const std::vector<std::complex<double>>& c);

  // ∫|∇f|^2 from a half spectrum
  double dirichlet(const std::vector<std::complex<double>>& c) const;

 private:
  struct Buffers;
  GridSpec grid_;
  std::vector<double> k2_;
  std::vector<double> weight_;
  std::unique_ptr<Buffers> buf_;
};

Field poisson_solve(const Field& w);
Field laplacian(const Field& f);
double integrate(const Field& f);
double dirichlet_energy(const Field& f);

// circular shift by whole cells: out(x) = f(x - s)
Field circular_shift(const Field& f, std::array<int, 3> s);

}  // namespace okpf
