#include <cmath>

#include "doctest.h"
#include "nsac/error.hpp"
#include "nsac/galerkin.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

ModelParams euler_ac() {
  ModelParams p;
  p.model = ModelKind::EulerAC;
  return p;
}

State smooth_state(const GridPtr& g, std::uint64_t seed) {
  InitialCondition ic;
  ic.recipe = "random_bandlimited";
  ic.seed = seed;
  ic.amplitude = 1.0;
  ic.phase_amplitude = 0.8;
  ic.modes = 3;
  return make_initial_state(ic, g, euler_ac());
}

/// Largest spectral magnitude outside (keep = 0) or inside (keep = 1) a mask.
double spectral_max(const ScalarField& f, const std::vector<double>& mask, double keep) {
  const auto c = to_spectral(f);
  double m = 0.0;
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (mask[n] == keep) m = std::max(m, std::abs(c[n]));
  }
  return m;
}

}  // namespace

TEST_CASE("basis ordering on a small torus") {
  const auto g = torus(8);
  const auto b = galerkin_basis(*g, 1);
  const std::vector<std::array<int, 2>> expect{{0, 1}, {1, 0},  {1, -1}, {1, 1},  {0, 2},  {2, 0},
                                               {1, -2}, {1, 2}, {2, -1}, {2, 1}, {2, -2}, {2, 2}};
  CHECK(b.modes == expect);
  CHECK(b.eigenvalues.front() == doctest::Approx(2.0));
  CHECK(b.eigenvalues.back() == doctest::Approx(9.0));
  CHECK(galerkin_basis(*g, 2).eigenvalues.back() == doctest::Approx(81.0));
  for (std::size_t n = 1; n < b.size(); ++n) CHECK(b.eigenvalues[n] >= b.eigenvalues[n - 1]);
  CHECK_THROWS_AS(galerkin_basis(*channel(8, 9)), Error);
}

TEST_CASE("project_modes is idempotent, contractive and the identity at full size") {
  Rng rng(51);
  const auto g = torus(32);
  const auto b = galerkin_basis(*g);
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = random_solenoidal(g, rng, 6);
    for (std::size_t m : {1u, 5u, 16u, 40u}) {
      const auto p = project_modes(f, m, b);
      const auto pp = project_modes(p, m, b);
      CHECK(max_diff(pp.x, p.x) < 1e-14);
      CHECK(max_diff(pp.y, p.y) < 1e-14);
      CHECK(norm(p, Norm::l2()) <= norm(f, Norm::l2()));
      CHECK(max_abs(divergence(p)) < 1e-10);
    }
    const auto all = project_modes(f, b.size(), b);
    CHECK(max_diff(all.x, f.x) < 1e-12);
    CHECK(max_diff(all.y, f.y) < 1e-12);
  }
}

TEST_CASE("project_modes keeps exactly the first m modes") {
  Rng rng(52);
  const auto g = torus(16);
  const auto b = galerkin_basis(*g);
  const auto f = random_solenoidal(g, rng, 4);
  const std::size_t m = 6;
  const auto p = project_modes(f, m, b);
  const auto mask = mode_mask(*g, b, m);
  CHECK(spectral_max(p.x, mask, 0.0) < 1e-12);
  CHECK(spectral_max(p.y, mask, 0.0) < 1e-12);
  const auto cf = to_spectral(f.x), cp = to_spectral(p.x);
  for (std::size_t n = 0; n < cf.size(); ++n) {
    if (mask[n] == 1.0) CHECK(std::abs(cf[n] - cp[n]) < 1e-10);
  }
}

TEST_CASE("m above the basis size is clamped") {
  Rng rng(53);
  const auto g = torus(8);
  const auto b = galerkin_basis(*g);
  const auto f = random_solenoidal(g, rng, 2);
  const auto p = project_modes(f, 1000, b);
  const auto q = project_modes(f, b.size(), b);
  CHECK(max_diff(p.x, q.x) == 0.0);
}

TEST_CASE("equilibrium data has a zero energy residual") {
  const auto g = torus(16);
  State s;
  s.u = VectorField(g);
  s.phase = {ScalarField(g, 1.0)};
  GalerkinConfig cfg;
  cfg.m = 8;
  cfg.dt = 0.01;
  cfg.T = 0.1;
  const auto r = galerkin_run(cfg, euler_ac(), s);
  for (double v : r.residuals) CHECK(v == 0.0);
  CHECK(r.accumulated_residual == 0.0);
  CHECK(r.m_used == 8);
}

TEST_CASE("accumulated residual is first order in dt") {
  const auto g = torus(32);
  const State s0 = smooth_state(g, 54);
  std::vector<double> res;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    GalerkinConfig cfg;
    cfg.m = 16;
    cfg.dt = dt;
    cfg.T = 0.2;
    res.push_back(std::abs(galerkin_run(cfg, euler_ac(), s0).accumulated_residual));
  }
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    const double ratio = res[i] / res[i + 1];
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
  }
}

TEST_CASE("only the momentum is truncated") {
  const auto g = torus(32);
  const State s0 = smooth_state(g, 55);
  GalerkinConfig cfg;
  cfg.m = 8;
  cfg.dt = 2e-3;
  cfg.T = 0.05;
  const auto r = galerkin_run(cfg, euler_ac(), s0);
  const auto b = galerkin_basis(*g);
  const auto mask = mode_mask(*g, b, cfg.m);
  CHECK(spectral_max(r.final.u.x, mask, 0.0) < 1e-10);
  CHECK(spectral_max(r.final.u.y, mask, 0.0) < 1e-10);
  CHECK(spectral_max(r.final.phase[0], mask, 0.0) > 1e-3);
}

TEST_CASE("full mode count reproduces the untruncated EulerAC run") {
  const auto g = torus(32);
  const State s0 = smooth_state(g, 56);
  const auto b = galerkin_basis(*g);
  GalerkinConfig cfg;
  cfg.m = b.size();
  cfg.dt = 2e-3;
  cfg.T = 0.1;
  const auto r = galerkin_run(cfg, euler_ac(), s0);
  SchemeConfig sc;
  sc.dt = cfg.dt;
  sc.cfl_target = 0.0;
  const State ref = run_to(s0, cfg.T, euler_ac(), sc).first;
  CHECK(max_diff(r.final.u.x, ref.u.x) < 1e-10);
  CHECK(max_diff(r.final.u.y, ref.u.y) < 1e-10);
  CHECK(max_diff(r.final.phase[0], ref.phase[0]) < 1e-10);
}

TEST_CASE("galerkin_run rejects viscous models") {
  const auto g = torus(16);
  GalerkinConfig cfg;
  CHECK_THROWS_AS(galerkin_run(cfg, ModelParams{}, smooth_state(g, 57)), Error);
}
