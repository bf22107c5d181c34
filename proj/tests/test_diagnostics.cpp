#include <cmath>

#include "doctest.h"
#include "nsac/diagnostics.hpp"
#include "nsac/error.hpp"
#include "nsac/timestep.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

State still(const GridPtr& g, double phi) {
  State s;
  s.u = VectorField(g);
  s.phase = {ScalarField(g, phi)};
  return s;
}

State taylor_green(const GridPtr& g) {
  InitialCondition ic;
  ic.recipe = "taylor_green";
  ic.amplitude = 1.0;
  return make_initial_state(ic, g, ModelParams{});
}

}  // namespace

TEST_CASE("energy of the equilibrium is zero") {
  const auto g = torus(32);
  const auto e = energy_record(still(g, 1.0), ModelParams{});
  CHECK(e.total() == 0.0);
  CHECK(e.dissipation() == 0.0);
}

TEST_CASE("potential of phi = 0") {
  const auto g = torus(32);
  ModelParams p;
  p.lambda = 1.0;
  p.epsilon = 1.0;
  const auto e = total_energy(still(g, 0.0), p);
  CHECK(e.potential == doctest::Approx(kPi * kPi).epsilon(1e-13));
  CHECK(e.kinetic == 0.0);
  CHECK(e.gradient == 0.0);
  CHECK(e.total() == e.potential);
}

TEST_CASE("Taylor-Green energy and dissipation") {
  const auto g = torus(64);
  const auto s = taylor_green(g);
  ModelParams p;
  p.nu = 0.01;
  const auto e = energy_record(s, p);
  CHECK(e.kinetic == doctest::Approx(kPi * kPi).epsilon(1e-12));
  CHECK(e.gradient == doctest::Approx(0.0));
  CHECK(e.viscous_dissipation == doctest::Approx(0.01 * 4 * kPi * kPi).epsilon(1e-12));
  CHECK(e.viscous_dissipation == doctest::Approx(0.3948).epsilon(1e-4));
  CHECK(e.phase_dissipation == doctest::Approx(0.0));
  CHECK(total_energy(s, p).viscous_dissipation == 0.0);
  CHECK(dissipation(s, p).kinetic == 0.0);

  ModelParams inviscid;
  inviscid.model = ModelKind::EulerAC;
  inviscid.nu = 0.5;
  CHECK(dissipation(s, inviscid).viscous_dissipation == 0.0);
}

TEST_CASE("energy components are nonnegative and additive") {
  Rng rng(41);
  const auto g = torus(32);
  ModelParams p;
  for (int trial = 0; trial < 3; ++trial) {
    State s;
    s.u = random_solenoidal(g, rng, 4);
    s.phase = {random_field(g, rng, 4)};
    const auto e = energy_record(s, p);
    CHECK(e.kinetic >= 0.0);
    CHECK(e.gradient >= 0.0);
    CHECK(e.potential >= 0.0);
    CHECK(e.viscous_dissipation >= 0.0);
    CHECK(e.phase_dissipation >= 0.0);
    CHECK(e.total() == e.kinetic + e.gradient + e.potential);
  }
}

TEST_CASE("pair_difference examples") {
  const auto g = torus(64);
  const auto a = taylor_green(g);
  const auto z = pair_difference(a, a);
  CHECK(z.vel_l2 == 0.0);
  CHECK(z.phase_h1 == 0.0);

  State b = a;
  b.u.x += ScalarField(g, 0.3);
  CHECK(pair_difference(a, b).vel_l2 == doctest::Approx(2 * kPi * 0.3).epsilon(1e-12));

  State c = still(g, 0.0), d = still(g, 0.0);
  c.phase[0] = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  CHECK(pair_difference(c, d).phase_h1 == doctest::Approx(2 * kPi).epsilon(1e-12));
}

TEST_CASE("pair_difference is symmetric") {
  Rng rng(42);
  const auto g = torus(32);
  State a, b;
  a.u = random_solenoidal(g, rng);
  b.u = random_solenoidal(g, rng);
  a.phase = {random_field(g, rng)};
  b.phase = {random_field(g, rng)};
  const auto ab = pair_difference(a, b), ba = pair_difference(b, a);
  CHECK(ab.vel_l2 == ba.vel_l2);
  CHECK(ab.phase_h1 == ba.phase_h1);
}

TEST_CASE("pair_difference rejects mismatched states") {
  const auto a = still(torus(16), 1.0);
  CHECK_THROWS_AS(pair_difference(a, still(torus(32), 1.0)), Error);
  State later = a;
  later.t = 0.5;
  try {
    pair_difference(a, later);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Mismatch);
  }
}

TEST_CASE("energy residual definition") {
  std::vector<EnergyRecord> flat(4);
  for (int n = 0; n < 4; ++n) {
    flat[n].t = 0.1 * n;
    flat[n].kinetic = 2.0;
  }
  for (double r : energy_residual_series(flat)) CHECK(r == 0.0);

  std::vector<EnergyRecord> grow = flat;
  for (int n = 0; n < 4; ++n) grow[n].kinetic = 1.0 + n;
  for (double r : energy_residual_series(grow)) CHECK(r > 0.0);

  std::vector<EnergyRecord> two(2);
  two[0].t = 0.0;
  two[0].kinetic = 1.0;
  two[0].viscous_dissipation = 2.0;
  two[1].t = 0.5;
  two[1].kinetic = 0.25;
  two[1].phase_dissipation = 1.0;
  // (0.25 - 1) + 0.5 * (2 + 1) / 2
  CHECK(energy_residual_series(two)[0] == doctest::Approx(0.0));
  CHECK(accumulated_residual(grow) == doctest::Approx(3.0));

  CHECK_THROWS_AS(energy_residual_series(std::span<const EnergyRecord>(flat.data(), 1)), Error);
}

TEST_CASE("per-interval energy residual is first order in dt") {
  const auto g = torus(32);
  ModelParams p;
  p.nu = 0.02;
  InitialCondition ic;
  ic.recipe = "random_bandlimited";
  ic.seed = 3;
  ic.amplitude = 1.0;
  ic.phase_amplitude = 0.8;
  ic.modes = 3;
  const State s0 = make_initial_state(ic, g, p);
  std::vector<double> worst;
  for (int level = 0; level < 3; ++level) {
    SchemeConfig sc;
    sc.dt = 4e-3 / (1 << level);
    sc.cfl_target = 0.0;
    RunOptions ro;
    ro.sample_stride = 5 << level;
    const auto rec = run_to(s0, 0.2, p, sc, ro).second;
    double m = 0.0;
    for (double r : energy_residual_series(rec.energy)) m = std::max(m, std::abs(r));
    worst.push_back(m);
  }
  for (std::size_t i = 0; i + 1 < worst.size(); ++i) {
    const double ratio = worst[i] / worst[i + 1];
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
  }
}

TEST_CASE("unforced viscous energy does not grow") {
  const auto g = torus(32);
  ModelParams p;
  p.nu = 0.02;
  InitialCondition ic;
  ic.recipe = "random_bandlimited";
  ic.seed = 4;
  ic.phase_amplitude = 0.8;
  SchemeConfig sc;
  sc.dt = 2e-3;
  sc.cfl_target = 0.0;
  RunOptions ro;
  ro.sample_stride = 10;
  const auto rec = run_to(make_initial_state(ic, g, p), 0.3, p, sc, ro).second;
  for (std::size_t n = 0; n + 1 < rec.energy.size(); ++n) {
    CHECK(rec.energy[n + 1].total() <= rec.energy[n].total() + 1e-6);
  }
}

TEST_CASE("fit_power_law recovers exact power laws") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  const auto f = fit_power_law(x, y);
  CHECK(f.exponent == doctest::Approx(-1.5));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.r_squared == doctest::Approx(1.0));
}
