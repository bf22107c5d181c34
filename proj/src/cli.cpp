#include "nsac/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>

#include "nsac/checkpoint.hpp"
#include "nsac/config.hpp"
#include "nsac/error.hpp"
#include "nsac/galerkin.hpp"
#include "nsac/kato.hpp"
#include "nsac/sweep.hpp"

namespace nsac {

namespace {

struct Common {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c, bool seed = true) {
  sub->add_option("--config", c.config, "configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--output", c.output, "output directory (overrides NSAC_OUTPUT_DIR and output_dir)");
  if (seed) sub->add_option("--seed", c.seed, "initial-condition seed (overrides ic.seed)");
}

RunConfig load_run(const Common& c) {
  AnyConfig any = load_config(c.config);
  RunConfig r = std::holds_alternative<RunConfig>(any) ? std::get<RunConfig>(any)
                                                       : std::get<SweepConfig>(any).base;
  apply_env_overrides(r);
  if (!c.output.empty()) r.output_dir = c.output;
  if (c.seed) r.ic.seed = *c.seed;
  return r;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
  f << text;
}

CsvTable energy_csv(const RunRecord& rec, bool with_kato) {
  CsvTable t;
  t.schema = "energy";
  t.version = schema_version(t.schema);
  t.columns = {"t", "kinetic", "gradient", "potential", "total", "viscous_dissipation",
               "phase_dissipation"};
  if (with_kato) t.columns.push_back("kato_integrand");
  for (std::size_t i = 0; i < rec.energy.size(); ++i) {
    const EnergyRecord& e = rec.energy[i];
    std::vector<std::string> row{format_double(e.t), format_double(e.kinetic),
                                 format_double(e.gradient), format_double(e.potential),
                                 format_double(e.total()), format_double(e.viscous_dissipation),
                                 format_double(e.phase_dissipation)};
    if (with_kato) row.push_back(format_double(rec.kato_series[i]));
    t.add_row(std::move(row));
  }
  return t;
}

// Smooth manufactured pair satisfying the wall conditions of each geometry.
Manufactured builtin_manufactured(const GridSpec& s) {
  const double a = 2.0 * std::numbers::pi / s.lx;
  if (s.geometry == Geometry::Torus) {
    const double b = 2.0 * std::numbers::pi / s.ly;
    return {[=](double x, double y, double t) {
              const double e = std::exp(-t);
              return std::array<double, 2>{e * std::sin(a * x) * std::cos(b * y),
                                           -e * (a / b) * std::cos(a * x) * std::sin(b * y)};
            },
            [=](double x, double y, double t) {
              return 0.5 * std::exp(-t) * std::cos(a * x + b * y);
            }};
  }
  const double q = std::numbers::pi / s.ly;
  return {[=](double x, double y, double t) {
            const double e = std::exp(-t);
            return std::array<double, 2>{e * q * std::sin(a * x) * std::sin(2.0 * q * y),
                                         -e * a * std::cos(a * x) * std::sin(q * y) * std::sin(q * y)};
          },
          [=](double x, double y, double t) {
            return 0.5 * std::exp(-t) * std::cos(a * x) * std::cos(q * y);
          }};
}

int cmd_simulate(const Common& c, std::size_t ckpt_every, bool ckpt_final, const std::string& restart,
                 std::ostream& out) {
  const RunConfig r = load_run(c);
  const std::filesystem::path dir = r.output_dir;
  const ModelParams params = r.params.normalized();
  State start;
  if (!restart.empty()) {
    start = checkpoint_load(restart, r.grid, r.params).state;
  } else {
    start = make_initial_state(r.ic, build_grid(r.grid), r.params);
  }
  const bool strip = r.grid.geometry == Geometry::Channel && coefficients(params).viscous &&
                     coefficients(params).nu > 0.0;
  RunOptions ro;
  ro.sample_stride = r.sample_stride;
  if (strip) ro.strip_delta = r.strip_constant * coefficients(params).nu;
  std::size_t samples = 0;
  if (ckpt_every > 0) {
    ro.on_sample = [&](const State& s, std::size_t step) {
      if (samples++ % ckpt_every == 0) {
        checkpoint_save(s, r.params, dir / ("step_" + std::to_string(step) + ".ckpt"));
      }
    };
  }
  auto [final_state, rec] = run_to(start, r.T_final, r.params, r.scheme, ro);
  write_text(dir / "run.cfg", echo(r));
  write_csv(dir / "energy.csv", energy_csv(rec, strip));
  if (ckpt_final) checkpoint_save(final_state, r.params, dir / "final.ckpt");
  const EnergyRecord& e0 = rec.energy.front();
  const EnergyRecord& e1 = rec.energy.back();
  out << "simulate: steps=" << rec.steps << " t=" << format_double(final_state.t)
      << " E0=" << format_double(e0.total()) << " E=" << format_double(e1.total())
      << " residual="
      << format_double(rec.energy.size() > 1 ? accumulated_residual(rec.energy) : 0.0) << " output="
      << (dir / "energy.csv").string() << '\n';
  return 0;
}

int cmd_sweep(const Common& c, std::optional<int> workers, std::ostream& out) {
  AnyConfig any = load_config(c.config);
  if (!std::holds_alternative<SweepConfig>(any)) {
    throw Error(ErrorKind::Config, "sweep.nu_ladder: required key missing");
  }
  SweepConfig s = std::get<SweepConfig>(any);
  apply_env_overrides(s);
  if (!c.output.empty()) s.base.output_dir = c.output;
  if (c.seed) s.base.ic.seed = *c.seed;
  if (workers) s.workers = *workers;
  s.validate();
  const std::filesystem::path dir = s.base.output_dir;
  write_text(dir / "sweep.cfg", echo(s));
  const SweepResult res = viscosity_sweep(s, dir);
  write_sweep_outputs(res, dir);
  for (const auto& row : res.rows) {
    out << "nu=" << format_double(row.nu) << " error=" << format_double(row.error)
        << " kato=" << format_double(row.kato) << '\n';
  }
  if (!res.reference.smooth) out << "warning: reference not smooth over the horizon\n";
  try {
    const RateFit f = rate_fit(res);
    out << "exponent=" << format_double(f.exponent) << " r_squared=" << format_double(f.r_squared)
        << '\n';
  } catch (const Error&) {
    out << "exponent=n/a (fewer than 4 positive errors)\n";
  }
  return 0;
}

int cmd_rate_fit(const std::string& input, const std::string& metric, const std::string& output,
                 std::ostream& out) {
  const RateFit f = rate_fit(read_csv(input), metric);
  out << "exponent=" << format_double(f.exponent) << " intercept=" << format_double(f.intercept)
      << " r_squared=" << format_double(f.r_squared) << " points=" << f.nus.size() << '\n';
  if (!output.empty()) write_csv(std::filesystem::path(output) / "rate_fit.csv", rate_fit_csv(f));
  return 0;
}

int cmd_galerkin(const Common& c, const std::vector<std::size_t>& ms, const std::vector<double>& dts,
                 int s, std::ostream& out) {
  const RunConfig r = load_run(c);
  const State init = make_initial_state(r.ic, build_grid(r.grid), r.params);
  const GalerkinStudy st = galerkin_study(ms, dts, r.T_final, s, r.params, init);
  CsvTable t;
  t.schema = "galerkin_study";
  t.version = schema_version(t.schema);
  t.columns = {"m", "dt", "residual", "ratio", "diff_to_double"};
  for (const auto& row : st.rows) {
    for (std::size_t i = 0; i < st.dts.size(); ++i) {
      const double ratio = i == 0 ? std::nan("") : row.ratios[i - 1];
      t.add_row({std::to_string(row.m), format_double(st.dts[i]), format_double(row.residuals[i]),
                 format_double(ratio), format_double(row.diff_to_double)});
    }
    out << "m=" << row.m << " diff_to_2m=" << format_double(row.diff_to_double) << " ratios=";
    for (std::size_t i = 0; i < row.ratios.size(); ++i) {
      out << (i ? "," : "") << format_double(row.ratios[i]);
    }
    out << '\n';
  }
  write_csv(std::filesystem::path(r.output_dir) / "galerkin_study.csv", t);
  return 0;
}

int cmd_kato(const Common& c, const std::vector<double>& deltas, std::ostream& out) {
  const RunConfig r = load_run(c);
  if (r.grid.geometry != Geometry::Channel) {
    throw Error(ErrorKind::UnsupportedGeometry, "kato-check: needs a channel grid");
  }
  const State init = make_initial_state(r.ic, build_grid(r.grid), r.params);
  const CorrectorScalings sc = corrector_scalings(init.u, deltas);
  const std::filesystem::path dir = r.output_dir;
  CsvTable t;
  t.schema = "corrector_scalings";
  t.version = schema_version(t.schema);
  t.columns = {"delta", "theta_l2", "theta_l4", "grad_l2", "rho_grad_linf", "rho_grad_l2"};
  for (const auto& n : sc.rows) {
    t.add_row({format_double(n.delta), format_double(n.theta_l2), format_double(n.theta_l4),
               format_double(n.grad_l2), format_double(n.rho_grad_linf),
               format_double(n.rho_grad_l2)});
  }
  write_csv(dir / "corrector_scalings.csv", t);
  out << "exponents theta_l2=" << format_double(sc.theta_l2) << " theta_l4="
      << format_double(sc.theta_l4) << " grad_l2=" << format_double(sc.grad_l2)
      << " rho_grad_linf=" << format_double(sc.rho_grad_linf)
      << " rho_grad_l2=" << format_double(sc.rho_grad_l2) << '\n';

  const ModelParams params = r.params.normalized();
  const double nu = coefficients(params).nu;
  if (!(nu > 0.0)) {
    out << "kato: skipped (inviscid model)\n";
    return 0;
  }
  RunOptions ro;
  ro.sample_stride = r.sample_stride;
  ro.strip_delta = r.strip_constant * nu;
  auto [final_state, rec] = run_to(init, r.T_final, r.params, r.scheme, ro);
  const double kappa = kato_integral(rec, r.strip_constant, nu);
  CsvTable k;
  k.schema = "kato";
  k.version = schema_version(k.schema);
  k.columns = {"t", "integrand", "cumulative"};
  double acc = 0.0;
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    if (i > 0) {
      acc += 0.5 * (rec.times[i] - rec.times[i - 1]) * (rec.kato_series[i] + rec.kato_series[i - 1]);
    }
    k.add_row({format_double(rec.times[i]), format_double(rec.kato_series[i]), format_double(acc)});
  }
  write_csv(dir / "kato.csv", k);
  out << "kato nu=" << format_double(nu) << " delta=" << format_double(*ro.strip_delta)
      << " integral=" << format_double(kappa) << '\n';
  return 0;
}

int cmd_mms(const Common& c, const std::vector<double>& dts, const std::vector<int>& res, double T,
            std::ostream& out) {
  const RunConfig r = load_run(c);
  MmsOptions o;
  o.T = T;
  o.scheme = r.scheme.scheme;
  if (!dts.empty()) o.dts = dts;
  if (!res.empty()) o.resolutions = res;
  const MmsReport rep = mms_verify(r.params, r.grid, builtin_manufactured(r.grid), o);
  const std::filesystem::path dir = r.output_dir;
  CsvTable tt;
  tt.schema = "mms_temporal";
  tt.version = schema_version(tt.schema);
  tt.columns = {"dt", "error"};
  for (std::size_t i = 0; i < rep.dts.size(); ++i) {
    tt.add_row({format_double(rep.dts[i]), format_double(rep.temporal_errors[i])});
  }
  CsvTable ts;
  ts.schema = "mms_spatial";
  ts.version = schema_version(ts.schema);
  ts.columns = {"nx", "error"};
  for (std::size_t i = 0; i < rep.resolutions.size(); ++i) {
    ts.add_row({std::to_string(rep.resolutions[i]), format_double(rep.spatial_errors[i])});
  }
  write_csv(dir / "mms_temporal.csv", tt);
  write_csv(dir / "mms_spatial.csv", ts);
  out << "mms temporal_order=" << format_double(rep.temporal_order)
      << " spatial_floor=" << format_double(rep.spatial_floor) << '\n';
  return 0;
}

std::string quoted(const std::string& s) {
  std::string q;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') q.push_back('\\');
    q.push_back(ch == '\n' ? ' ' : ch);
  }
  return q;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nsac: Navier-Stokes/Allen-Cahn vanishing-viscosity experiments"};
  app.require_subcommand(1);

  Common sim_c, sw_c, gal_c, kato_c, mms_c;
  std::size_t ckpt_every = 0;
  bool ckpt_final = false;
  std::string restart;
  auto* sim = app.add_subcommand("simulate", "run one configuration, write energy.csv");
  add_common(sim, sim_c);
  sim->add_option("--checkpoint-every", ckpt_every, "checkpoint every N samples (0 = off)");
  sim->add_flag("--checkpoint", ckpt_final, "write final.ckpt");
  sim->add_option("--restart", restart, "start from a checkpoint")->check(CLI::ExistingFile);

  std::optional<int> workers;
  auto* sw = app.add_subcommand("sweep", "viscosity sweep, write sweep_table.csv and sweep_series.csv");
  add_common(sw, sw_c);
  sw->add_option("--workers", workers, "concurrent runs (overrides NSAC_WORKERS and sweep.workers)")
      ->check(CLI::PositiveNumber);

  std::string input, metric = "error", rf_output;
  auto* rf = app.add_subcommand("rate-fit", "fit log(error) against log(nu) from a sweep table");
  rf->add_option("--input", input, "sweep_table.csv")->required()->check(CLI::ExistingFile);
  rf->add_option("--metric", metric, "error column: error or error_sq")
      ->check(CLI::IsMember({"error", "error_sq"}));
  rf->add_option("--output", rf_output, "directory for rate_fit.csv (optional)");

  std::vector<std::size_t> ms{8, 16, 32, 64};
  std::vector<double> gal_dts{4e-3, 2e-3, 1e-3};
  int gal_s = 1;
  auto* gal = app.add_subcommand("galerkin-study", "m-ladder of the modified Galerkin method");
  add_common(gal, gal_c);
  gal->add_option("--m", ms, "mode counts")->delimiter(',');
  gal->add_option("--dts", gal_dts, "time steps for the residual order")->delimiter(',');
  gal->add_option("--s", gal_s, "eigenvalue exponent of the basis");

  std::vector<double> deltas{0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002};
  auto* kc = app.add_subcommand("kato-check", "corrector scalings and the Kato integral");
  add_common(kc, kato_c);
  kc->add_option("--deltas", deltas, "strip widths")->delimiter(',');

  std::vector<double> mms_dts;
  std::vector<int> mms_res;
  double mms_T = 0.1;
  auto* mms = app.add_subcommand("mms-verify", "manufactured-solution convergence report");
  add_common(mms, mms_c, false);
  mms->add_option("--dts", mms_dts, "temporal ladder")->delimiter(',');
  mms->add_option("--resolutions", mms_res, "spatial ladder (nx)")->delimiter(',');
  mms->add_option("--T", mms_T, "horizon");

  if (argc > 1 && argv[1][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == argv[1];
    if (!known) {
      err << "error: kind=usage message=\"unknown subcommand '" << quoted(argv[1]) << "'\"\n";
      return 2;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: kind=usage message=\"" << quoted(e.what()) << "\"\n";
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(sim_c, ckpt_every, ckpt_final, restart, out);
    if (*sw) return cmd_sweep(sw_c, workers, out);
    if (*rf) return cmd_rate_fit(input, metric, rf_output, out);
    if (*gal) return cmd_galerkin(gal_c, ms, gal_dts, gal_s, out);
    if (*kc) return cmd_kato(kato_c, deltas, out);
    if (*mms) return cmd_mms(mms_c, mms_dts, mms_res, mms_T, out);
  } catch (const Error& e) {
    err << "error: kind=" << to_string(e.kind()) << " message=\"" << quoted(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: kind=internal message=\"" << quoted(e.what()) << "\"\n";
    return 1;
  }
  return 2;
}

}  // namespace nsac
