#pragma once

// Energy accounting and viscous/inviscid pair comparison.

#include <span>
#include <vector>

#include "nsac/model.hpp"

namespace nsac {

struct EnergyRecord {
  double t = 0.0;
  double kinetic = 0.0;    ///< 1/2 |u|^2
  double gradient = 0.0;   ///< lambda/2 |grad phi|^2
  double potential = 0.0;  ///< lambda int F(phi)
  double viscous_dissipation = 0.0;  ///< nu |grad u|^2
  double phase_dissipation = 0.0;    ///< lambda gamma |Lap phi - f(phi)|^2

  double total() const { return kinetic + gradient + potential; }
  double dissipation() const { return viscous_dissipation + phase_dissipation; }
};

struct DiffRecord {
  double t = 0.0;
  double vel_l2 = 0.0;
  double phase_h1 = 0.0;
};

/// Energy side only (dissipation entries left at zero).
EnergyRecord total_energy(const State& state, const ModelParams& params);
/// Dissipation side only (energy entries left at zero).
EnergyRecord dissipation(const State& state, const ModelParams& params);
/// Both sides.
EnergyRecord energy_record(const State& state, const ModelParams& params);

/// |u_a - u_b|_{L2} and |phi_a - phi_b|_{H1} (summed over components).
DiffRecord pair_difference(const State& a, const State& b, WallBc phase_bc = WallBc::Neumann);

/// r_n = E_{n+1} - E_n + (t_{n+1} - t_n) (D_n + D_{n+1}) / 2.
std::vector<double> energy_residual_series(std::span<const EnergyRecord> records);
/// Sum of energy_residual_series.
double accumulated_residual(std::span<const EnergyRecord> records);

/// Least-squares fit of log(y) = exponent * log(x) + intercept.
struct PowerFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
/// Requires at least two points with x, y > 0.
PowerFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace nsac
