#pragma once

// Semi-implicit time integration.
//
// Diffusion (nu Lap u, gamma Lap phi) and the stabilizer gamma*s0*(phi^{n+1} - phi^n)
// are implicit; advection, stress, f(phi) and forcing are explicit.
// IMEX1 is backward/forward Euler, IMEX2 is SBDF2 (second-order BDF with
// extrapolated explicit terms) started by one IMEX1 step.
//
// Torus: spectral in both axes, velocity kept divergence-free by projection.
// Channel: vorticity/streamfunction for the non-mean x-modes and the x-mean
// velocity U(y) advanced directly. Viscous runs close the wall vorticity
// with Thom's condition, imposed implicitly per mode.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsac/diagnostics.hpp"
#include "nsac/model.hpp"

namespace nsac {

enum class Scheme { IMEX1, IMEX2 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SchemeConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::IMEX1;
  /// Defaults to 2/eps^2 when unset.
  std::optional<double> stabilizer_s0;
  /// Courant target for adaptive dt (0 disables). dt never exceeds `dt`.
  double cfl_target = 0.4;

  void validate() const;
  double s0(const ModelParams& params) const;
  bool operator==(const SchemeConfig&) const = default;
};

/// Courant numbers above this abort the step.
inline constexpr double kCflCeiling = 1.0;

/// dt * max(|u_x|/dx + |u_y|/dy_local).
double courant_number(const State& state, double dt);

/// Acts on the projected spectral momentum tendency (torus only).
using MomentumFilter = std::function<void(SpectralArray& mx, SpectralArray& my)>;

/// Stateful integrator; keeps the history needed by IMEX2 and cached solves.
class Integrator {
 public:
  Integrator(ModelParams params, SchemeConfig scheme, ForcingFn forcing = {},
             MomentumFilter filter = {});
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  /// Advances by `dt`. IMEX2 falls back to one IMEX1 step whenever the step
  /// size differs from the previous one or no history exists.
  State step(const State& state, double dt);
  State step(const State& state) { return step(state, scheme_.dt); }

  /// Step size respecting cfl_target (and never above scheme.dt).
  double next_dt(const State& state) const;
  void reset();

  const ModelParams& params() const { return params_; }
  const SchemeConfig& scheme() const { return scheme_; }

 private:
  struct Impl;
  ModelParams params_;
  SchemeConfig scheme_;
  std::unique_ptr<Impl> impl_;
};

/// One IMEX1 step of size scheme.dt (convenience wrapper).
State step(const State& state, const ModelParams& params, const SchemeConfig& scheme);

/// Fills derived prognostic fields (channel vorticity) and restores the
/// boundary invariants of the model. Used for initial conditions.
State prepare_state(State state, const ModelParams& params);

struct RunOptions {
  int sample_stride = 1;
  /// Strip width for the Kato integrand samples (channel only).
  std::optional<double> strip_delta;
  bool keep_snapshots = false;
  ForcingFn forcing;
  MomentumFilter momentum_filter;
  std::function<void(const State&, std::size_t step)> on_sample;
};

struct RunRecord {
  std::vector<double> times;
  std::vector<EnergyRecord> energy;
  /// nu |grad u|^2_{L2(strip)} per sample; empty unless a strip was requested.
  std::vector<double> kato_series;
  std::optional<double> strip_delta;
  std::vector<State> snapshots;
  std::size_t steps = 0;
};

/// Advances to exactly T, sampling at t0, every `sample_stride` steps and at T.
std::pair<State, RunRecord> run_to(const State& state, double T, const ModelParams& params,
                                   const SchemeConfig& scheme, const RunOptions& options = {});

/// Number of fixed-dt steps run_to takes from t0 to T.
std::size_t step_count(double t0, double T, double dt);

/// Analytic (u*, phi*) with time dependence.
struct Manufactured {
  std::function<std::array<double, 2>(double x, double y, double t)> u;
  std::function<double(double x, double y, double t)> phi;
};

/// Residual forcing of the model operators applied to the manufactured fields.
Forcing manufactured_forcing(const Manufactured& m, const ModelParams& params, const GridPtr& grid,
                             double t);
/// Samples the manufactured fields as a State.
State manufactured_state(const Manufactured& m, const ModelParams& params, const GridPtr& grid,
                         double t);
/// Throws InvalidArgument when the fields violate the model boundary conditions.
void check_manufactured_bc(const Manufactured& m, const ModelParams& params, const GridSpec& spec);

struct MmsOptions {
  double T = 0.1;
  Scheme scheme = Scheme::IMEX1;
  /// Temporal ladder on the base grid.
  std::vector<double> dts{0.02, 0.01, 0.005, 0.0025};
  /// Spatial ladder (nx values; ny scales with nx) at `spatial_dt`.
  std::vector<int> resolutions{32, 64, 128};
  double spatial_dt = 0.01;
};

struct MmsReport {
  std::vector<double> dts;
  std::vector<double> temporal_errors;
  double temporal_order = 0.0;
  std::vector<int> resolutions;
  /// Difference to the finest grid at the coarse nodes (last entry 0).
  std::vector<double> spatial_errors;
  double spatial_floor = 0.0;
};

MmsReport mms_verify(const ModelParams& params, const GridSpec& base, const Manufactured& m,
                     const MmsOptions& options = {});

}  // namespace nsac
