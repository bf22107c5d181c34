#pragma once

// Boundary-layer corrector and the Kato quantities on the channel.
//
// The corrector is built from the streamfunction xi of the inviscid velocity v,
// gauged to vanish on each wall:
//   Phi   = chi(y/delta) xi_bottom + chi((ly - y)/delta) xi_top
//   theta = (Dw_y Phi, -D_x Phi)
// where Dw_y is the one-sided difference pointing away from the nearest wall
// (forward in the lower half, backward in the upper half). Dw_y commutes with
// the spectral D_x, so D_x theta_x + Dw_y theta_y vanishes to rounding, theta
// is exactly zero where the wall distance is >= delta, and theta_x on a wall
// equals the mean of v_x over the first cell.

#include <vector>

#include "nsac/timestep.hpp"

namespace nsac {

/// chi(r) = 1 - 3r^2 + 2r^3 on [0, 1], 0 beyond.
double cutoff(double r);
/// chi'(r).
double cutoff_derivative(double r);

struct Corrector {
  VectorField theta;
  double delta = 0.0;
};

/// Throws InvalidArgument if delta > ly/2 or delta <= 0, UnsupportedGeometry on the torus.
Corrector build_corrector(const VectorField& v, double delta);

/// y-derivative with the wall-directed one-sided differences used by the corrector.
ScalarField wall_directed_dy(const ScalarField& f);
/// D_x theta_x + Dw_y theta_y.
ScalarField corrector_divergence(const VectorField& theta);

/// Number of y nodes within distance delta of one wall (excluding the wall node).
int strip_cells(const Grid& grid, double delta);

struct CorrectorNorms {
  double delta = 0.0;
  double theta_l2 = 0.0;
  double theta_l4 = 0.0;
  double grad_l2 = 0.0;
  double rho_grad_linf = 0.0;
  double rho_grad_l2 = 0.0;
};

CorrectorNorms corrector_norms(const Corrector& c);

struct CorrectorScalings {
  std::vector<CorrectorNorms> rows;
  double theta_l2 = 0.0;
  double theta_l4 = 0.0;
  double grad_l2 = 0.0;
  double rho_grad_linf = 0.0;
  double rho_grad_l2 = 0.0;
};

/// Log-log exponents of the corrector norms over a delta ladder. The ladder
/// must span at least two decades and every delta must cover >= 8 cells.
CorrectorScalings corrector_scalings(const VectorField& v, const std::vector<double>& deltas);

/// Trapezoid integral of the record's nu |grad u|^2_{L2(strip)} samples.
/// The record's strip width must equal c * nu.
double kato_integral(const RunRecord& record, double c, double nu);

struct ErrorBudget {
  std::vector<double> times;
  std::vector<double> Y;  ///< |u - v + theta|^2 + lambda |phi - psi|_1^2
  std::vector<double> a;
  std::vector<double> b;
  double delta = 0.0;
  double C = 1.0;
};

/// Assembles Y, a, b from snapshot series of a viscous and an inviscid run.
/// `theta` holds one corrector per sample (same times).
ErrorBudget error_budget(const RunRecord& viscous, const RunRecord& inviscid,
                         const std::vector<Corrector>& theta, const ModelParams& params,
                         double C = 1.0);

/// Y(t) for one pair of states and one corrector.
double budget_Y(const State& u, const State& v, const VectorField& theta, double lambda,
                WallBc phase_bc);

}  // namespace nsac
