#include <cmath>
#include <random>

#include "doctest.h"
#include "nsac/diagnostics.hpp"
#include "nsac/error.hpp"
#include "nsac/sweep.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

SweepConfig small_sweep(std::vector<double> ladder, Geometry geom = Geometry::Torus) {
  SweepConfig s;
  s.base.grid.geometry = geom;
  s.base.grid.nx = 16;
  s.base.grid.ny = geom == Geometry::Torus ? 16 : 17;
  if (geom == Geometry::Channel) {
    s.base.grid.ly = 1.0;
    s.base.grid.wall_stretch = 1.5;
  }
  s.base.params.model = ModelKind::NSAC;
  s.base.ic.recipe = geom == Geometry::Torus ? "random_bandlimited" : "channel_shear_layer";
  s.base.ic.seed = 3;
  s.base.ic.modes = 2;
  s.base.ic.phase_amplitude = 0.5;
  s.base.scheme.dt = 0.01;
  s.base.T_final = 0.1;
  s.base.sample_stride = 2;
  s.nu_ladder = std::move(ladder);
  return s;
}

}  // namespace

TEST_CASE("a one-entry sweep equals the manual pair") {
  const SweepConfig cfg = small_sweep({0.05});
  const SweepResult res = viscosity_sweep(cfg);
  REQUIRE(res.rows.size() == 1);

  const State start = make_initial_state(cfg.base.ic, build_grid(cfg.base.grid), cfg.base.params);
  SchemeConfig sc = cfg.base.scheme;
  sc.cfl_target = 0.0;
  RunOptions ro;
  ro.sample_stride = cfg.base.sample_stride;
  ro.keep_snapshots = true;
  ModelParams visc = cfg.base.params;
  visc.nu = 0.05;
  ModelParams inv = cfg.base.params;
  inv.model = ModelKind::EulerAC;
  const auto a = run_to(start, cfg.base.T_final, visc, sc, ro);
  const auto b = run_to(start, cfg.base.T_final, inv, sc, ro);
  REQUIRE(a.second.snapshots.size() == b.second.snapshots.size());
  double sup = 0.0;
  for (std::size_t k = 0; k < a.second.snapshots.size(); ++k) {
    const DiffRecord d = pair_difference(a.second.snapshots[k], b.second.snapshots[k], WallBc::Neumann);
    sup = std::max(sup, d.vel_l2 * d.vel_l2 + visc.lambda * d.phase_h1 * d.phase_h1);
  }
  const SweepRow& row = res.rows[0];
  CHECK(row.error_sq == sup);
  CHECK(row.error == std::sqrt(sup));
  CHECK(row.steps == 10);
  CHECK(row.series.times.size() == a.second.snapshots.size());
  CHECK(row.ic_hash == row.ref_ic_hash);
  CHECK(row.ic_hash == state_hash(start));
  CHECK(res.reference.params.model == ModelKind::EulerAC);
  CHECK(res.reference.smooth);
  CHECK(row.kato == 0.0);
}

TEST_CASE("zero viscosity against the inviscid reference gives zero error") {
  const SweepResult res = viscosity_sweep(small_sweep({0.0}));
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].error <= 1e-13);
  // the channel keeps no-slip walls at nu = 0, so only the torus pair coincides
  const SweepResult ch = viscosity_sweep(small_sweep({0.0}, Geometry::Channel));
  CHECK(ch.rows[0].error > 1e-3);
}

TEST_CASE("sweeps ignore the Courant target") {
  SweepConfig cfg = small_sweep({0.1, 0.05});
  cfg.base.scheme.cfl_target = 0.4;
  cfg.base.ic.amplitude = 20.0;
  const SweepResult res = viscosity_sweep(cfg);
  for (const auto& row : res.rows) CHECK(row.steps == 10);
}

TEST_CASE("worker count does not change results") {
  SweepConfig cfg = small_sweep({0.1, 0.05, 0.02, 0.01, 0.005});
  const SweepResult one = viscosity_sweep(cfg);
  cfg.workers = 3;
  const SweepResult three = viscosity_sweep(cfg);
  REQUIRE(one.rows.size() == three.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].index == i);
    CHECK(three.rows[i].nu == cfg.nu_ladder[i]);
    CHECK(one.rows[i].error_sq == three.rows[i].error_sq);
  }
  CHECK(csv_payload(to_text(sweep_table_csv(one))) == csv_payload(to_text(sweep_table_csv(three))));
}

TEST_CASE("channel sweeps carry a Kato integral and write their tables") {
  const auto dir = temp_dir("sweep_out");
  SweepConfig cfg = small_sweep({0.1, 0.05, 0.02}, Geometry::Channel);
  const SweepResult res = viscosity_sweep(cfg);
  for (const auto& row : res.rows) {
    CHECK(row.kato > 0.0);
    CHECK(row.series.kato_integrand.size() == row.series.times.size());
  }
  write_sweep_outputs(res, dir);
  const CsvTable t = read_csv(dir / "sweep_table.csv");
  expect_schema(t, "sweep_table");
  CHECK(t.rows.size() == cfg.nu_ladder.size());
  CHECK(t.numbers("kato")[2] == res.rows[2].kato);
  const CsvTable s = read_csv(dir / "sweep_series.csv");
  expect_schema(s, "sweep_series");
  CHECK(s.rows.size() == 3 * res.rows[0].series.times.size());
}

TEST_CASE("finest pairing uses the smallest viscosity as reference") {
  SweepConfig cfg = small_sweep({0.1, 0.05, 0.02});
  cfg.pairing = Pairing::AgainstFinest;
  const SweepResult res = viscosity_sweep(cfg);
  CHECK(res.reference.params.model == ModelKind::NSAC);
  CHECK(res.reference.params.nu == 0.02);
  CHECK(res.rows[2].error == 0.0);
  CHECK(res.rows[0].error > res.rows[1].error);
}

TEST_CASE("refined reference restricts onto the ladder grid") {
  for (Geometry g : {Geometry::Torus, Geometry::Channel}) {
    SweepConfig cfg = small_sweep({0.0}, g);
    const GridSpec fine = refined_spec(cfg.base.grid);
    CHECK(fine.nx == 2 * cfg.base.grid.nx);
    const GridPtr coarse = build_grid(cfg.base.grid);
    const ModelParams p = cfg.base.params;
    const State f = make_initial_state(cfg.base.ic, build_grid(fine), p);
    const State c = make_initial_state(cfg.base.ic, coarse, p);
    const State r = restrict_state(f, coarse);
    // same band-limited recipe on nested nodes
    CHECK(max_diff(r.u.x, c.u.x) < 1e-12);
    CHECK(max_diff(r.phase[0], c.phase[0]) < 1e-12);

    // same viscosity on a refined reference leaves only the coarse-grid error
    cfg.nu_ladder = {0.05};
    cfg.pairing = Pairing::AgainstFinest;
    cfg.refined_reference = true;
    const double e16 = viscosity_sweep(cfg).rows[0].error;
    cfg.base.grid.nx *= 2;
    cfg.base.grid.ny = g == Geometry::Torus ? 32 : 33;
    const double e32 = viscosity_sweep(cfg).rows[0].error;
    CHECK(e16 > 0.0);
    CHECK(e32 < 0.5 * e16);
    CHECK_THROWS_AS(restrict_state(c, build_grid(fine)), Error);
  }
}

TEST_CASE("rate fit examples") {
  const std::vector<double> nus{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> e, e3, noisy;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (double nu : nus) {
    e.push_back(std::sqrt(nu));
    e3.push_back(3.0 * nu);
    noisy.push_back(std::sqrt(nu) * (1.0 + u(rng)));
  }
  const RateFit a = rate_fit(nus, e);
  CHECK(a.exponent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const RateFit b = rate_fit(nus, e3);
  CHECK(b.exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  const RateFit c = rate_fit(nus, noisy);
  CHECK(c.exponent >= 0.45);
  CHECK(c.exponent <= 0.55);

  std::vector<double> with_zero = e;
  with_zero[0] = 0.0;
  CHECK(rate_fit(nus, with_zero).nus.size() == 4);
  with_zero[1] = std::nan("");
  CHECK_THROWS_AS(rate_fit(nus, with_zero), Error);
  std::vector<double> six_nu = nus, six_e = e;
  six_nu.push_back(1e-4);
  six_e.push_back(0.0);
  const RateFit d = rate_fit(six_nu, six_e);
  CHECK(d.dropped == 1);
  CHECK(d.nus.size() == 5);
  CHECK_THROWS_AS(rate_fit(std::span(nus).first(3), std::span(e).first(3)), Error);
  CHECK_THROWS_AS(rate_fit(nus, std::span(e).first(4)), Error);

  const CsvTable t = rate_fit_csv(a);
  CHECK(t.rows.size() == 5);
  CHECK(t.numbers("fitted")[2] == doctest::Approx(0.1).epsilon(1e-12));
}
