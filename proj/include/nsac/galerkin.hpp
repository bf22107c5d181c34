#pragma once

// Modified Galerkin method on the torus: the momentum tendency is truncated
// to the first m divergence-free Fourier modes, the phase equation is not.

#include <array>
#include <vector>

#include "nsac/timestep.hpp"

namespace nsac {

/// Divergence-free Fourier modes. Each entry is a half-plane representative
/// (kx > 0, or kx = 0 and ky > 0) standing for the +-k pair; k = 0 and modes
/// removed by the 2/3 rule are excluded. Ordered by |k|^2 (physical), ties
/// broken lexicographically on (kx, ky).
struct GalerkinBasis {
  std::vector<std::array<int, 2>> modes;
  std::vector<double> eigenvalues;  ///< (1 + |k|^2)^s
  int s = 1;
  GridSpec spec;

  std::size_t size() const { return modes.size(); }
};

GalerkinBasis galerkin_basis(const Grid& grid, int s = 1);

/// Spectral keep-mask (1/0 per element) for the first m modes; m is clamped to the basis size.
std::vector<double> mode_mask(const Grid& grid, const GalerkinBasis& basis, std::size_t m);

/// Keeps exactly the first m basis modes of a divergence-free field.
/// m above the basis size is clamped (a warning goes to stderr).
VectorField project_modes(const VectorField& field, std::size_t m, const GalerkinBasis& basis);

struct GalerkinConfig {
  std::size_t m = 16;
  int s = 1;
  double dt = 1e-3;
  double T = 0.5;
  int sample_stride = 1;
};

struct GalerkinResult {
  State final;
  RunRecord record;
  std::vector<double> residuals;
  double accumulated_residual = 0.0;
  std::size_t m_used = 0;
};

/// EulerAC on the torus with the momentum tendency projected by P_m.
GalerkinResult galerkin_run(const GalerkinConfig& config, const ModelParams& params,
                            const State& initial);

struct GalerkinStudyRow {
  std::size_t m = 0;
  std::vector<double> residuals;    ///< |accumulated residual| per dt
  std::vector<double> ratios;       ///< successive residual ratios
  double diff_to_double = 0.0;      ///< |v_m - v_2m|_{L2}(T)
};

struct GalerkinStudy {
  std::vector<double> dts;
  std::vector<GalerkinStudyRow> rows;
};

/// Runs the m-ladder: residual order over `dts` for each m, and the
/// difference to the 2m run at the finest dt.
GalerkinStudy galerkin_study(const std::vector<std::size_t>& ms, const std::vector<double>& dts,
                             double T, int s, const ModelParams& params, const State& initial);

}  // namespace nsac
