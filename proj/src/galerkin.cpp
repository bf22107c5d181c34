#include "nsac/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numbers>

#include "nsac/error.hpp"

namespace nsac {

GalerkinBasis galerkin_basis(const Grid& grid, int s) {
  if (!grid.is_torus()) {
    throw Error(ErrorKind::UnsupportedGeometry, "galerkin_basis: torus only");
  }
  GalerkinBasis b;
  b.s = s;
  b.spec = grid.spec();
  const int nx = grid.nx(), ny = grid.ny();
  const double ax = 2.0 * std::numbers::pi / grid.spec().lx;
  const double ay = 2.0 * std::numbers::pi / grid.spec().ly;
  struct Entry {
    double k2;
    int kx, ky;
  };
  std::vector<Entry> e;
  for (int kx = 0; 3 * kx < nx; ++kx) {
    for (int ky = -(ny - 1) / 3; 3 * std::abs(ky) < ny; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      e.push_back({ax * ax * kx * kx + ay * ay * ky * ky, kx, ky});
    }
  }
  std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& c) {
    if (a.k2 != c.k2) return a.k2 < c.k2;
    if (a.kx != c.kx) return a.kx < c.kx;
    return a.ky < c.ky;
  });
  for (const auto& x : e) {
    b.modes.push_back({x.kx, x.ky});
    b.eigenvalues.push_back(std::pow(1.0 + x.k2, s));
  }
  return b;
}

std::vector<double> mode_mask(const Grid& grid, const GalerkinBasis& basis, std::size_t m) {
  if (!(grid.spec() == basis.spec)) {
    throw Error(ErrorKind::Mismatch, "mode_mask: basis built for a different grid");
  }
  m = std::min(m, basis.size());
  const int nkx = grid.nkx(), ny = grid.ny();
  std::vector<double> mask(grid.spectral_size(), 0.0);
  for (std::size_t n = 0; n < m; ++n) {
    const int kx = basis.modes[n][0], ky = basis.modes[n][1];
    const int r = ((ky % ny) + ny) % ny;
    mask[static_cast<std::size_t>(r) * nkx + kx] = 1.0;
    if (kx == 0) mask[static_cast<std::size_t>((ny - r) % ny) * nkx] = 1.0;
  }
  return mask;
}

namespace {

std::size_t clamp_m(std::size_t m, const GalerkinBasis& basis) {
  if (m > basis.size()) {
    std::cerr << "warning: galerkin m=" << m << " exceeds the " << basis.size()
              << " available modes; clamped\n";
    return basis.size();
  }
  return m;
}

}  // namespace

VectorField project_modes(const VectorField& field, std::size_t m, const GalerkinBasis& basis) {
  const Grid& g = field.x.g();
  const auto mask = mode_mask(g, basis, clamp_m(m, basis));
  auto cx = to_spectral(field.x);
  auto cy = to_spectral(field.y);
  kernels::omp::scale(cx, mask);
  kernels::omp::scale(cy, mask);
  return VectorField(from_spectral(field.grid(), cx), from_spectral(field.grid(), cy));
}

GalerkinResult galerkin_run(const GalerkinConfig& config, const ModelParams& raw,
                            const State& initial) {
  const ModelParams params = raw.normalized();
  if (params.model != ModelKind::EulerAC) {
    throw Error(ErrorKind::InvalidArgument, "galerkin_run: requires the EulerAC model");
  }
  if (config.m < 1) throw Error(ErrorKind::InvalidArgument, "galerkin: m must be >= 1");
  const Grid& g = *initial.grid();
  const GalerkinBasis basis = galerkin_basis(g, config.s);
  GalerkinResult out;
  out.m_used = clamp_m(config.m, basis);
  const auto mask = mode_mask(g, basis, out.m_used);

  State start = initial;
  start.u = project_modes(leray_project(initial.u), out.m_used, basis);
  SchemeConfig sc;
  sc.dt = config.dt;
  sc.cfl_target = 0.0;
  RunOptions ro;
  ro.sample_stride = config.sample_stride;
  ro.momentum_filter = [&mask](SpectralArray& mx, SpectralArray& my) {
    kernels::omp::scale(mx, mask);
    kernels::omp::scale(my, mask);
  };
  auto [final_state, record] = run_to(start, config.T, params, sc, ro);
  out.final = std::move(final_state);
  out.record = std::move(record);
  out.residuals = energy_residual_series(out.record.energy);
  for (double r : out.residuals) out.accumulated_residual += r;
  return out;
}

GalerkinStudy galerkin_study(const std::vector<std::size_t>& ms, const std::vector<double>& dts,
                             double T, int s, const ModelParams& params, const State& initial) {
  if (ms.empty() || dts.empty()) {
    throw Error(ErrorKind::InvalidArgument, "galerkin_study: empty m or dt ladder");
  }
  GalerkinStudy st;
  st.dts = dts;
  const double fine_dt = *std::min_element(dts.begin(), dts.end());
  std::map<std::size_t, State> finals;
  auto final_at = [&](std::size_t m) -> const State& {
    auto it = finals.find(m);
    if (it == finals.end()) {
      it = finals.emplace(m, galerkin_run({m, s, fine_dt, T, 1 << 30}, params, initial).final).first;
    }
    return it->second;
  };
  for (std::size_t m : ms) {
    GalerkinStudyRow row;
    row.m = m;
    for (double dt : dts) {
      GalerkinResult r = galerkin_run({m, s, dt, T, 1}, params, initial);
      row.residuals.push_back(std::abs(r.accumulated_residual));
      if (dt == fine_dt) finals.emplace(m, r.final);
    }
    for (std::size_t i = 1; i < row.residuals.size(); ++i) {
      row.ratios.push_back(row.residuals[i - 1] / row.residuals[i]);
    }
    row.diff_to_double = norm(final_at(m).u - final_at(2 * m).u, Norm::l2());
    st.rows.push_back(std::move(row));
  }
  return st;
}

}  // namespace nsac
