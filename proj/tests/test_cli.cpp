#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nsac/checkpoint.hpp"
#include "nsac/cli.hpp"
#include "nsac/csv.hpp"
#include "nsac/timestep.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

struct Outcome {
  int rc;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nsac");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(int(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

const char* kTorus = R"(grid.geometry = torus
grid.nx = 16
grid.ny = 16
model.kind = NSAC
scheme.dt = 0.01
ic.recipe = random_bandlimited
ic.modes = 2
ic.seed = 4
ic.phase_amplitude = 0.5
T_final = 0.1
)";

}  // namespace

TEST_CASE("simulate from an equilibrium checkpoint keeps the energy fixed") {
  const auto dir = temp_dir("cli_equilibrium");
  const auto g = torus(16);
  ModelParams p;
  State s;
  s.u = VectorField(g);
  s.phase = {ScalarField(g, 1.0)};
  s = prepare_state(s, p);
  checkpoint_save(s, p, dir / "eq.ckpt");
  const std::string cfg = write_file(dir / "run.cfg", std::string(kTorus));

  const Outcome o = cli({"simulate", "--config", cfg, "--output", (dir / "out").string(), "--restart",
                         (dir / "eq.ckpt").string()});
  REQUIRE_MESSAGE(o.rc == 0, o.err);
  CHECK(o.out.rfind("simulate: steps=10 ", 0) == 0);
  const CsvTable t = read_csv(dir / "out" / "energy.csv");
  expect_schema(t, "energy");
  const auto total = t.numbers("total");
  CHECK(total.size() == 11);
  for (double e : total) CHECK(e == total.front());
  for (double k : t.numbers("kinetic")) CHECK(k == 0.0);
  CHECK(std::filesystem::exists(dir / "out" / "run.cfg"));
}

TEST_CASE("simulate writes checkpoints that restart") {
  const auto dir = temp_dir("cli_ckpt");
  const std::string cfg = write_file(dir / "run.cfg", std::string(kTorus));
  const Outcome a = cli({"simulate", "--config", cfg, "--output", dir.string(), "--checkpoint",
                         "--checkpoint-every", "5"});
  REQUIRE_MESSAGE(a.rc == 0, a.err);
  CHECK(std::filesystem::exists(dir / "final.ckpt"));
  CHECK(std::filesystem::exists(dir / "step_0.ckpt"));
  CHECK(std::filesystem::exists(dir / "step_5.ckpt"));
  const Checkpoint k = checkpoint_load(dir / "final.ckpt");
  CHECK(k.state.t == doctest::Approx(0.1).epsilon(1e-14));

  // already at T_final: nothing to do
  const Outcome again = cli({"simulate", "--config", cfg, "--output", (dir / "b").string(), "--restart",
                             (dir / "final.ckpt").string()});
  REQUIRE_MESSAGE(again.rc == 0, again.err);
  CHECK(again.out.find("steps=0 ") != std::string::npos);
  CHECK(again.out.find("residual=0 ") != std::string::npos);
}

TEST_CASE("rate-fit reads an exact square-root table") {
  const auto dir = temp_dir("cli_rate");
  CsvTable t;
  t.schema = "sweep_table";
  t.version = 1;
  t.columns = {"nu", "error", "error_sq"};
  for (double nu : {0.1, 0.03, 0.01, 0.003, 0.001}) {
    t.add_row({format_double(nu), format_double(std::sqrt(nu)), format_double(nu)});
  }
  write_csv(dir / "sweep_table.csv", t);
  const Outcome o = cli({"rate-fit", "--input", (dir / "sweep_table.csv").string(), "--output", dir.string()});
  REQUIRE_MESSAGE(o.rc == 0, o.err);
  CHECK(o.out.rfind("exponent=0.5", 0) == 0);
  CHECK(o.out.find("points=5") != std::string::npos);
  CHECK(read_csv(dir / "rate_fit.csv").rows.size() == 5);

  const Outcome sq = cli({"rate-fit", "--input", (dir / "sweep_table.csv").string(), "--metric", "error_sq"});
  CHECK(sq.out.rfind("exponent=1 ", 0) == 0);
  CHECK(cli({"rate-fit", "--input", (dir / "sweep_table.csv").string(), "--metric", "kato"}).rc == 2);
}

TEST_CASE("sweep writes one row per ladder entry") {
  const auto dir = temp_dir("cli_sweep");
  const std::string cfg = write_file(dir / "sweep.cfg", std::string(kTorus) +
                                                           "sweep.nu_ladder = [0.1, 0.05, 0.02, 0.01]\n");
  const Outcome o = cli({"sweep", "--config", cfg, "--output", dir.string(), "--workers", "2"});
  REQUIRE_MESSAGE(o.rc == 0, o.err);
  const CsvTable t = read_csv(dir / "sweep_table.csv");
  CHECK(t.rows.size() == 4);
  CHECK(o.out.rfind("nu=0.1 error=", 0) == 0);
  CHECK(o.out.find("exponent=") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "sweep_series.csv"));
  CHECK(std::filesystem::exists(dir / "sweep.cfg"));

  const std::string run = write_file(dir / "run.cfg", std::string(kTorus));
  const Outcome bad = cli({"sweep", "--config", run});
  CHECK(bad.rc == 1);
  CHECK(bad.err.find("kind=config") != std::string::npos);
}

TEST_CASE("galerkin-study, kato-check and mms-verify run") {
  const auto dir = temp_dir("cli_studies");
  std::string inv = kTorus;
  inv.replace(inv.find("NSAC"), 4, "EulerAC");
  const std::string cfg = write_file(dir / "inv.cfg", inv);
  const Outcome g = cli({"galerkin-study", "--config", cfg, "--output", dir.string(), "--m", "4,8",
                         "--dts", "0.02,0.01"});
  REQUIRE_MESSAGE(g.rc == 0, g.err);
  CHECK(g.out.rfind("m=4 ", 0) == 0);
  CHECK(read_csv(dir / "galerkin_study.csv").rows.size() == 4);

  const std::string ch = write_file(dir / "ch.cfg", R"(grid.geometry = channel
grid.nx = 16
grid.ny = 257
grid.wall_stretch = 3.5
model.kind = NSAC
model.nu = 0.05
scheme.dt = 0.01
ic.recipe = channel_shear_layer
T_final = 0.05
)");
  const Outcome k = cli({"kato-check", "--config", ch, "--output", dir.string()});
  REQUIRE_MESSAGE(k.rc == 0, k.err);
  CHECK(k.out.rfind("exponents theta_l2=", 0) == 0);
  CHECK(k.out.find("kato nu=0.05") != std::string::npos);
  CHECK(read_csv(dir / "kato.csv").rows.size() == 6);
  CHECK(read_csv(dir / "corrector_scalings.csv").rows.size() == 7);

  const Outcome kt = cli({"kato-check", "--config", cfg});
  CHECK(kt.rc == 1);
  CHECK(kt.err.find("kind=unsupported_geometry") != std::string::npos);

  const Outcome m = cli({"mms-verify", "--config", cfg, "--output", dir.string(), "--dts", "0.02,0.01,0.005",
                         "--resolutions", "16,32", "--T", "0.05"});
  REQUIRE_MESSAGE(m.rc == 0, m.err);
  CHECK(m.out.rfind("mms temporal_order=", 0) == 0);
  CHECK(read_csv(dir / "mms_spatial.csv").rows.size() == 2);
}

TEST_CASE("usage and runtime errors") {
  const Outcome u = cli({"frobnicate"});
  CHECK(u.rc == 2);
  CHECK(u.err.rfind("error: kind=usage message=\"unknown subcommand 'frobnicate'\"", 0) == 0);
  CHECK(cli({}).rc == 2);
  const Outcome missing = cli({"simulate", "--config", "/nonexistent/run.cfg"});
  CHECK(missing.rc == 2);
  CHECK(missing.err.rfind("error: kind=usage", 0) == 0);

  const auto dir = temp_dir("cli_errors");
  const Outcome bad = cli({"simulate", "--config", write_file(dir / "bad.cfg", "grid.geometry = torus\nmodel.kind = NSAC\nscheme.dtt = 1\n")});
  CHECK(bad.rc == 1);
  CHECK(bad.err.find("kind=config") != std::string::npos);
  CHECK(bad.err.find("scheme.dtt") != std::string::npos);
  CHECK(cli({"--help"}).rc == 0);
}
