#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>

#include "okpf/energy.hpp"
#include "okpf/grid.hpp"

namespace okpf {

struct StepperConfig {
  double L1 = 1.0;
  double L2 = 5.0;
  double dt = 1.25e-4;
  std::uint64_t max_steps = 100000;
  // an infinite tolerance switches the stationarity test off
  double stop_tol = 1e-3;
  std::uint64_t checkpoint_every = 10000;
  std::uint64_t trace_every = 100;

  void validate() const;
  bool operator==(const StepperConfig&) const = default;
};

struct RunState {
  Field u;
  Field v;
  double time = 0.0;
  std::uint64_t step = 0;
  EnergyBreakdown last_energy{};
};

struct SplitConstants {
  static constexpr double a_uu = 87.0;
  static constexpr double a_uv = 27.0;
  static constexpr double a_vv = 54.0;
};

// (W1, W2) with W1 = 87u²/2 + 27uv + 27v²
std::pair<double, double> split_W(double u, double v);

// Reusable integrator: keeps the transform plans and implicit denominators.
class Stepper {
 public:
  Stepper(const GridSpec& g, const PhysParams& p, const StepperConfig& cfg);
  ~Stepper();

  // Advances in place; returns max-norm of the discrete time derivative.
  double advance(RunState& s);

  const PhysParams& params() const { return p_; }
  const StepperConfig& config() const { return cfg_; }

 private:
  struct Impl;
  PhysParams p_;
  StepperConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

RunState step(const RunState& s, const PhysParams& p, const StepperConfig& cfg,
              double* residual = nullptr);

// u-mode and v-mode amplification of the linear implicit part; both lie in (0, 1]
std::pair<double, double> linear_amplification(double k2, const PhysParams& p,
                                               const StepperConfig& cfg);

enum class Termination { converged, max_steps };

struct RunCallbacks {
  std::function<void(const RunState&, double residual)> on_trace;
  std::function<void(const RunState&)> on_checkpoint;
};

struct RunResult {
  RunState state;
  Termination reason = Termination::max_steps;
  double residual = std::numeric_limits<double>::infinity();
};

// Fires callbacks on the initial state, at each cadence multiple, and on the
// final state (unless that step was already reported).
RunResult run(RunState s, const PhysParams& p, const StepperConfig& cfg,
              const RunCallbacks& cb = {});

// Potential gauge: φ is re-centred on its mean over the exterior {u+v < threshold}
// before comparing, since the periodic solve pins ∫φ = 0 rather than φ = 0 far away.
// Empty exterior or φ ≡ 0 gives nullopt.
std::optional<double> screening_check(const Field& u, const Field& v, const PhysParams& p,
                                      double threshold = 0.01);

}  // namespace okpf
