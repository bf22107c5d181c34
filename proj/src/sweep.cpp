#include "nsac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "nsac/error.hpp"
#include "nsac/initial.hpp"
#include "nsac/kato.hpp"

namespace nsac {

GridSpec refined_spec(const GridSpec& spec) {
  GridSpec f = spec;
  f.nx = 2 * spec.nx;
  f.ny = spec.geometry == Geometry::Channel ? 2 * (spec.ny - 1) + 1 : 2 * spec.ny;
  return f;
}

State restrict_state(const State& fine, const GridPtr& coarse) {
  const GridSpec& fs = fine.grid()->spec();
  const GridSpec& cs = coarse->spec();
  const bool channel = cs.geometry == Geometry::Channel;
  if (fs.geometry != cs.geometry || fs.nx % cs.nx != 0 || fs.lx != cs.lx || fs.ly != cs.ly ||
      fs.wall_stretch != cs.wall_stretch) {
    throw Error(ErrorKind::Mismatch, "restrict_state: grids are not nested");
  }
  const int rx = fs.nx / cs.nx;
  const int ry = channel ? (fs.ny - 1) / (cs.ny - 1) : fs.ny / cs.ny;
  if (channel ? (fs.ny - 1) % (cs.ny - 1) != 0 : fs.ny % cs.ny != 0) {
    throw Error(ErrorKind::Mismatch, "restrict_state: grids are not nested in y");
  }
  auto inject = [&](const ScalarField& f) {
    ScalarField c(coarse);
    for (int j = 0; j < cs.ny; ++j) {
      for (int i = 0; i < cs.nx; ++i) c(i, j) = f(rx * i, ry * j);
    }
    return c;
  };
  State s;
  s.t = fine.t;
  s.u = VectorField(inject(fine.u.x), inject(fine.u.y));
  for (const auto& p : fine.phase) s.phase.push_back(inject(p));
  if (!fine.vorticity.empty()) s.vorticity = inject(fine.vorticity);
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double grad_linf(const State& s) {
  return norm(gradient_magnitude(s.u, WallBc::Dirichlet), Norm::linf());
}

struct Reference {
  ReferenceInfo info;
  std::vector<State> snapshots;  // on the ladder grid
};

Reference run_reference(const SweepConfig& cfg, const State& start, const SchemeConfig& sc) {
  const RunConfig& base = cfg.base;
  Reference ref;
  ref.info.params = cfg.pairing == Pairing::AgainstInviscid
                        ? ModelParams(base.params)
                        : with_viscosity(base.params, cfg.nu_ladder.back());
  if (cfg.pairing == Pairing::AgainstInviscid) {
    ref.info.params.model = inviscid_counterpart(base.params.model);
  }
  ref.info.params = ref.info.params.normalized();

  State init = start;
  GridPtr coarse = start.grid();
  if (cfg.refined_reference) {
    init = make_initial_state(base.ic, build_grid(refined_spec(base.grid)), base.params);
  }
  RunOptions ro;
  ro.sample_stride = base.sample_stride;
  ro.keep_snapshots = true;
  const auto t0 = Clock::now();
  auto [final_state, record] = run_to(init, base.T_final, ref.info.params, sc, ro);
  ref.info.runtime_s = seconds_since(t0);
  ref.info.steps = record.steps;
  for (auto& s : record.snapshots) {
    ref.snapshots.push_back(cfg.refined_reference ? restrict_state(s, coarse) : std::move(s));
  }
  ref.info.initial_grad_linf = grad_linf(ref.snapshots.front());
  bool finite = true;
  for (const auto& s : ref.snapshots) {
    finite = finite && s.all_finite();
    ref.info.sup_grad_linf = std::max(ref.info.sup_grad_linf, grad_linf(s));
  }
  ref.info.smooth = finite && ref.info.sup_grad_linf <=
                                  100.0 * std::max(ref.info.initial_grad_linf, 1e-300);
  return ref;
}

SweepRow run_member(const SweepConfig& cfg, std::size_t index, const State& start,
                    const Reference& ref, std::uint64_t ref_hash, const SchemeConfig& sc) {
  const RunConfig& base = cfg.base;
  const double nu = cfg.nu_ladder[index];
  const ModelParams params = with_viscosity(base.params, nu).normalized();
  const Coefficients c = coefficients(params);
  const WallBc pbc = phase_bc(params);
  const bool channel = start.grid()->is_channel();

  SweepRow row;
  row.index = index;
  row.nu = nu;
  row.ic_hash = state_hash(start);
  row.ref_ic_hash = ref_hash;

  RunOptions ro;
  ro.sample_stride = base.sample_stride;
  const bool strip = channel && nu > 0.0;
  if (strip) ro.strip_delta = base.strip_constant * nu;
  std::size_t k = 0;
  ro.on_sample = [&](const State& s, std::size_t) {
    if (k >= ref.snapshots.size()) {
      throw Error(ErrorKind::Mismatch, "sweep: member has more samples than the reference");
    }
    const State& v = ref.snapshots[k++];
    const DiffRecord d = pair_difference(s, v, pbc);
    row.series.times.push_back(d.t);
    row.series.vel_l2.push_back(d.vel_l2);
    row.series.phase_h1.push_back(d.phase_h1);
    row.series.error_sq.push_back(d.vel_l2 * d.vel_l2 + c.lambda * d.phase_h1 * d.phase_h1);
  };
  const auto t0 = Clock::now();
  auto [final_state, record] = run_to(start, base.T_final, params, sc, ro);
  row.runtime_s = seconds_since(t0);
  if (k != ref.snapshots.size()) {
    throw Error(ErrorKind::Mismatch, "sweep: member recorded " + std::to_string(k) +
                                         " samples, reference " +
                                         std::to_string(ref.snapshots.size()));
  }
  row.steps = record.steps;
  for (std::size_t i = 0; i < k; ++i) {
    row.error_sq = std::max(row.error_sq, row.series.error_sq[i]);
    row.sup_vel_l2 = std::max(row.sup_vel_l2, row.series.vel_l2[i]);
    row.sup_phase_h1 = std::max(row.sup_phase_h1, row.series.phase_h1[i]);
  }
  row.error = std::sqrt(row.error_sq);
  if (strip) {
    row.series.kato_integrand = record.kato_series;
    row.kato = kato_integral(record, base.strip_constant, nu);
  }
  return row;
}

}  // namespace

SweepResult viscosity_sweep(const SweepConfig& cfg, const std::filesystem::path& persist_dir) {
  cfg.validate();
  const RunConfig& base = cfg.base;
  const GridPtr grid = build_grid(base.grid);
  const State start = make_initial_state(base.ic, grid, base.params);
  SchemeConfig sc = base.scheme;
  sc.cfl_target = 0.0;

  SweepResult result;
  result.config = cfg;
  const Reference ref = run_reference(cfg, start, sc);
  result.reference = ref.info;
  const std::uint64_t ref_hash = state_hash(ref.snapshots.front());

  const std::size_t n = cfg.nu_ladder.size();
  std::vector<std::optional<SweepRow>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || abort.load()) return;
      try {
        rows[i] = run_member(cfg, i, start, ref, ref_hash, sc);
      } catch (...) {
        errors[i] = std::current_exception();
        abort.store(true);
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(cfg.workers, 1), n);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (auto& r : rows) {
    if (r) result.rows.push_back(std::move(*r));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    std::string what;
    ErrorKind kind = ErrorKind::InvalidArgument;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      what = e.what();
      kind = e.kind();
    } catch (const std::exception& e) {
      what = e.what();
    }
    const std::string msg =
        "sweep member " + std::to_string(i) + " (nu=" + format_double(cfg.nu_ladder[i]) + "): " + what;
    if (!persist_dir.empty()) write_sweep_outputs(result, persist_dir, "partial; " + msg);
    throw Error(kind, msg);
  }
  return result;
}

CsvTable sweep_table_csv(const SweepResult& r, const std::string& status) {
  CsvTable t;
  t.schema = "sweep_table";
  t.version = schema_version(t.schema);
  const RunConfig& b = r.config.base;
  t.comments.push_back("status " + status);
  t.comments.push_back("model " + to_string(b.params.model) + " geometry " +
                       to_string(b.grid.geometry) + " grid " + std::to_string(b.grid.nx) + "x" +
                       std::to_string(b.grid.ny) + " T_final " + format_double(b.T_final) +
                       " dt " + format_double(b.scheme.dt) + " pairing " +
                       to_string(r.config.pairing) + " reference " +
                       to_string(r.reference.params.model) +
                       (r.config.refined_reference ? " (refined)" : ""));
  t.comments.push_back("reference sup_grad_linf " + format_double(r.reference.sup_grad_linf) +
                       " initial " + format_double(r.reference.initial_grad_linf) + " smooth " +
                       (r.reference.smooth ? "yes" : "no"));
  t.comments.push_back("runtime reference " + format_double(r.reference.runtime_s) + " s");
  for (const auto& row : r.rows) {
    t.comments.push_back("runtime index " + std::to_string(row.index) + " " +
                         format_double(row.runtime_s) + " s");
  }
  t.columns = {"index", "nu", "error", "error_sq", "sup_vel_l2", "sup_phase_h1",
               "kato", "steps", "ic_hash", "ref_ic_hash"};
  for (const auto& row : r.rows) {
    t.add_row({std::to_string(row.index), format_double(row.nu), format_double(row.error),
               format_double(row.error_sq), format_double(row.sup_vel_l2),
               format_double(row.sup_phase_h1), format_double(row.kato), std::to_string(row.steps),
               format_hash(row.ic_hash), format_hash(row.ref_ic_hash)});
  }
  return t;
}

CsvTable sweep_series_csv(const SweepResult& r) {
  CsvTable t;
  t.schema = "sweep_series";
  t.version = schema_version(t.schema);
  t.columns = {"index", "nu", "t", "vel_l2", "phase_h1", "error_sq", "kato_integrand"};
  for (const auto& row : r.rows) {
    const auto& s = row.series;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      const double ki = i < s.kato_integrand.size() ? s.kato_integrand[i] : 0.0;
      t.add_row({std::to_string(row.index), format_double(row.nu), format_double(s.times[i]),
                 format_double(s.vel_l2[i]), format_double(s.phase_h1[i]),
                 format_double(s.error_sq[i]), format_double(ki)});
    }
  }
  return t;
}

void write_sweep_outputs(const SweepResult& r, const std::filesystem::path& dir,
                         const std::string& status) {
  std::filesystem::create_directories(dir);
  write_csv(dir / "sweep_table.csv", sweep_table_csv(r, status));
  write_csv(dir / "sweep_series.csv", sweep_series_csv(r));
}

RateFit rate_fit(std::span<const double> nus, std::span<const double> errors) {
  if (nus.size() != errors.size()) {
    throw Error(ErrorKind::InvalidArgument, "rate_fit: " + std::to_string(nus.size()) +
                                                " viscosities but " +
                                                std::to_string(errors.size()) + " errors");
  }
  RateFit f;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    const bool ok = nus[i] > 0.0 && errors[i] > 0.0 && std::isfinite(nus[i]) &&
                    std::isfinite(errors[i]);
    if (!ok) {
      ++f.dropped;
      continue;
    }
    f.nus.push_back(nus[i]);
    f.errors.push_back(errors[i]);
  }
  if (f.nus.size() < 4) {
    throw Error(ErrorKind::InvalidArgument, "rate_fit: need at least 4 positive (nu, error) pairs, got " +
                                                std::to_string(f.nus.size()));
  }
  const PowerFit p = fit_power_law(f.nus, f.errors);
  f.exponent = p.exponent;
  f.intercept = p.intercept;
  f.r_squared = p.r_squared;
  return f;
}

RateFit rate_fit(const SweepResult& r, const std::string& column) {
  std::vector<double> nus, errs;
  for (const auto& row : r.rows) {
    nus.push_back(row.nu);
    if (column == "error") {
      errs.push_back(row.error);
    } else if (column == "error_sq") {
      errs.push_back(row.error_sq);
    } else {
      throw Error(ErrorKind::InvalidArgument, "rate_fit: unknown metric '" + column + "'");
    }
  }
  return rate_fit(nus, errs);
}

RateFit rate_fit(const CsvTable& table, const std::string& column) {
  expect_schema(table, "sweep_table");
  if (column != "error" && column != "error_sq") {
    throw Error(ErrorKind::InvalidArgument, "rate_fit: unknown metric '" + column + "'");
  }
  const auto nus = table.numbers("nu");
  const auto errs = table.numbers(column);
  return rate_fit(nus, errs);
}

CsvTable rate_fit_csv(const RateFit& f) {
  CsvTable t;
  t.schema = "rate_fit";
  t.version = schema_version(t.schema);
  t.columns = {"nu", "error", "fitted", "exponent", "intercept", "r_squared"};
  for (std::size_t i = 0; i < f.nus.size(); ++i) {
    t.add_row({format_double(f.nus[i]), format_double(f.errors[i]),
               format_double(std::exp(f.intercept) * std::pow(f.nus[i], f.exponent)),
               format_double(f.exponent), format_double(f.intercept), format_double(f.r_squared)});
  }
  return t;
}

}  // namespace nsac
