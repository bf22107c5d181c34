#pragma once

// Right-hand sides for every supported PDE system.
//
// All models share one form,
//   u_t + (u.grad)u + grad p = nu Lap u - lambda div(grad phi (x) grad phi)
//   phi_t + (u.grad)phi      = gamma (Lap phi - f(phi)),
// with f(phi) = (phi^3 - phi)/eps^2 (scalar) or (|d|^2 - 1) d / eps^2 (vector).
// MHD maps onto it with lambda <- S, gamma <- 1/Rm, nu <- 1/Re and f = 0;
// TransportPhase has gamma = 0 and f = 0.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsac/field.hpp"
#include "nsac/operators.hpp"

namespace nsac {

enum class ModelKind {
  NSAC,
  EulerAC,
  MHD,
  MHDInviscid,
  LiquidCrystal,
  LiquidCrystalInviscid,
  TransportPhase,
};

std::string to_string(ModelKind kind);
ModelKind model_from_string(const std::string& name);

struct ModelParams {
  ModelKind model = ModelKind::NSAC;
  double nu = 0.01;
  double lambda = 0.1;
  double gamma = 1.0;
  double epsilon = 0.2;
  double s_coupling = 1.0;  ///< S, MHD only
  double re = 100.0;        ///< Re, MHD only (inf for the inviscid limit)
  double rm = 1.0;          ///< Rm, MHD only
  std::array<double, 2> wall_director{1.0, 0.0};  ///< d* for the liquid crystal walls

  /// Applies the per-model invariants (inviscid models get nu = 0, ...).
  ModelParams normalized() const;
  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

/// Coefficients of the common form after the model mapping.
struct Coefficients {
  double nu = 0.0;
  double lambda = 0.0;
  double gamma = 0.0;
  double epsilon = 1.0;
  bool has_potential = true;
  int phase_components = 1;
  bool viscous = true;
};

Coefficients coefficients(const ModelParams& params);
bool is_inviscid(ModelKind kind);
ModelKind inviscid_counterpart(ModelKind kind);
/// Same model with viscosity nu (for MHD: Re = 1/nu).
ModelParams with_viscosity(ModelParams params, double nu);
/// Boundary tag for phase derivatives (Dirichlet for the liquid crystal director).
WallBc phase_bc(const ModelParams& params);
/// Rejects model/geometry combinations outside the support matrix.
void check_support(const ModelParams& params, const Grid& grid);

struct State {
  double t = 0.0;
  VectorField u;
  std::vector<ScalarField> phase;
  /// Channel only: prognostic vorticity (empty on the torus).
  ScalarField vorticity;

  const GridPtr& grid() const { return u.grid(); }
  bool all_finite() const;
};

/// Double-well derivative f per phase component.
std::vector<ScalarField> f_eval(const std::vector<ScalarField>& phase, const ModelParams& params);
/// Double-well potential F (scalar field; summed over the vector magnitude).
ScalarField potential_F(const std::vector<ScalarField>& phase, const ModelParams& params);

enum class StressForm { Divergence, Reduced };

/// lambda div(grad phi (x) grad phi) (Divergence) or lambda Lap(phi) grad(phi)
/// (Reduced), summed over phase components, all products dealiased.
VectorField elastic_stress(const std::vector<ScalarField>& phase, double lambda, StressForm form,
                           WallBc bc = WallBc::Neumann);

/// External forcing added to the momentum and phase equations.
struct Forcing {
  VectorField momentum;
  std::vector<ScalarField> phase;
};
using ForcingFn = std::function<Forcing(double t)>;

/// Time derivative of a state. On the torus `velocity` is the Leray-projected
/// momentum tendency; on the channel the momentum tendency is carried by
/// `vorticity` (non-mean x-modes) and `mean_velocity` (x-mean of u_x per y node).
struct Tendency {
  VectorField velocity;
  ScalarField vorticity;
  std::vector<double> mean_velocity;
  std::vector<ScalarField> phase;
};

Tendency rhs(const State& state, const ModelParams& params, const Forcing* forcing = nullptr);

/// Explicit (nonlinear and forcing) parts of the tendency, before projection.
/// Used by the time integrator; linear diffusion is excluded.
struct ExplicitTerms {
  // Torus: spectral, dealiased, not projected.
  SpectralArray momentum_x, momentum_y;
  // Channel: spectral in x, dealiased.
  SpectralArray vorticity;
  std::vector<double> mean_velocity;
  std::vector<SpectralArray> phase;
};

ExplicitTerms explicit_terms(const State& state, const ModelParams& params,
                             const Forcing* forcing = nullptr);

/// Pointwise-identity check term: -(lambda Lap(phi) grad(phi), u) + (lambda (u.grad)phi, Lap(phi)).
double energy_transfer_residual(const VectorField& u, const ScalarField& phi, double lambda);

/// Primitive-variable MHD tendency for (u, B): the second evaluation route.
struct PrimitiveMhdTendency {
  VectorField velocity;
  VectorField magnetic;
};
PrimitiveMhdTendency primitive_mhd_rhs(const VectorField& u, const VectorField& b,
                                       const ModelParams& params);
/// B = (-dy phi, dx phi).
VectorField magnetic_from_potential(const ScalarField& phi);

/// Channel helpers.
std::vector<double> row_mean(const ScalarField& f);
ScalarField channel_vorticity(const VectorField& u);

}  // namespace nsac
