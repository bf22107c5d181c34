#pragma once

// Differential operators on both geometries. Periodic axes are
// differentiated spectrally; the channel y axis uses the second-order
// stencils stored on the grid.

#include <vector>

#include "nsac/field.hpp"

namespace nsac {

enum class Axis { X, Y };

enum class PoissonBc { TorusZeroMean, DirichletZero, NeumannZero };

using SpectralArray = std::vector<Complex>;

SpectralArray to_spectral(const ScalarField& f);
ScalarField from_spectral(const GridPtr& grid, const SpectralArray& coeffs);

/// First or second derivative along one axis. `bc` only matters for channel y-derivatives.
ScalarField derivative(const ScalarField& f, Axis axis, int order, WallBc bc = WallBc::Dirichlet);

VectorField gradient(const ScalarField& f, WallBc bc = WallBc::Dirichlet);
ScalarField laplacian(const ScalarField& f, WallBc bc = WallBc::Dirichlet);
ScalarField divergence(const VectorField& u, WallBc bc = WallBc::Dirichlet);
/// Scalar curl dx(u_y) - dy(u_x).
ScalarField curl(const VectorField& u, WallBc bc = WallBc::Dirichlet);
/// Pointwise Frobenius norm of the velocity gradient.
ScalarField gradient_magnitude(const VectorField& u, WallBc bc = WallBc::Dirichlet);
/// Pointwise |grad f|.
ScalarField gradient_magnitude(const ScalarField& f, WallBc bc = WallBc::Dirichlet);

/// Solves Laplacian(phi) = f. TorusZeroMean returns the zero-mean solution;
/// NeumannZero returns the solution with zero quadrature mean. Both reject
/// inputs whose mean exceeds `tolerance * (1 + max|f|)`.
ScalarField invert_laplacian(const ScalarField& f, PoissonBc bc, double tolerance = 1e-10);

/// Applies the 2/3-rule mask (both axes on the torus, x only on the channel).
ScalarField dealias(const ScalarField& f);
void dealias_in_place(const Grid& grid, SpectralArray& coeffs);
/// Dealiased product: pointwise product followed by the 2/3-rule mask.
ScalarField product(const ScalarField& a, const ScalarField& b);

/// Physical-space derivative along y for the channel using the stored stencils.
void apply_y_derivative(const Grid& grid, std::span<const double> in, std::span<double> out,
                        int order, WallBc bc);

}  // namespace nsac
