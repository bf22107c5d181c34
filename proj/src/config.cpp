#include "nsac/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nsac/csv.hpp"
#include "nsac/error.hpp"

namespace nsac {

std::string to_string(Pairing p) {
  return p == Pairing::AgainstInviscid ? "AgainstInviscid" : "AgainstFinest";
}

Pairing pairing_from_string(const std::string& name) {
  if (name == "AgainstInviscid") return Pairing::AgainstInviscid;
  if (name == "AgainstFinest") return Pairing::AgainstFinest;
  throw Error(ErrorKind::Config, "sweep.pairing: unknown pairing '" + name + "'");
}

void RunConfig::validate() const {
  grid.validate();
  params.validate();
  scheme.validate();
  ic.validate();
  if (!(T_final > 0.0) || !std::isfinite(T_final)) {
    throw Error(ErrorKind::Config, "T_final: must be finite and > 0");
  }
  if (sample_stride < 1) throw Error(ErrorKind::Config, "sample_stride: must be >= 1");
  if (!(strip_constant > 0.0) || !std::isfinite(strip_constant)) {
    throw Error(ErrorKind::Config, "strip_constant: must be finite and > 0");
  }
  if (output_dir.empty()) throw Error(ErrorKind::Config, "output_dir: must not be empty");
}

void SweepConfig::validate() const {
  base.validate();
  if (nu_ladder.empty()) throw Error(ErrorKind::Config, "sweep.nu_ladder: must not be empty");
  for (std::size_t i = 0; i < nu_ladder.size(); ++i) {
    if (!(nu_ladder[i] >= 0.0) || !std::isfinite(nu_ladder[i])) {
      throw Error(ErrorKind::Config, "sweep.nu_ladder: entries must be finite and >= 0");
    }
    if (i > 0 && !(nu_ladder[i] < nu_ladder[i - 1])) {
      throw Error(ErrorKind::Config, "sweep.nu_ladder: must be strictly decreasing (entry " +
                                         std::to_string(i) + " is " +
                                         format_double(nu_ladder[i]) + ", previous " +
                                         format_double(nu_ladder[i - 1]) + ")");
    }
  }
  if (is_inviscid(base.params.model)) {
    throw Error(ErrorKind::Config, "model.kind: a sweep needs a viscous model, got " +
                                       to_string(base.params.model));
  }
  if (workers < 1) throw Error(ErrorKind::Config, "sweep.workers: must be >= 1");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_type(const std::string& key, const char* expected, const std::string& v) {
  throw Error(ErrorKind::Config, key + ": expected " + expected + ", got '" + v + "'");
}

double as_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v, key);
  } catch (const Error&) {
    bad_type(key, "a number", v);
  }
}

long long as_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) bad_type(key, "an integer", v);
  return x;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_type(key, "true or false", v);
}

std::vector<double> as_list(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') bad_type(key, "a list [a, b, ...]", v);
  std::vector<double> out;
  const std::string inner = trim(std::string_view(v).substr(1, v.size() - 2));
  if (inner.empty()) return out;
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(as_double(key, trim(item)));
  return out;
}

std::string as_string(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  // Enum parsers and validators throw InvalidArgument; re-tag as Config.
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    std::string msg = e.what();
    if (msg.rfind(key, 0) != 0) msg = key + ": " + msg;
    throw Error(ErrorKind::Config, msg);
  }
}

struct Parsed {
  RunConfig run;
  SweepConfig sweep;
  bool is_sweep = false;
};

using Setter = std::function<void(Parsed&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = [] {
    std::map<std::string, Setter> m;
    auto dbl = [&m](const char* k, auto member) {
      m[k] = [member](Parsed& p, const std::string& key, const std::string& v) {
        member(p.run) = as_double(key, v);
      };
    };
    auto integer = [&m](const char* k, auto member) {
      m[k] = [member](Parsed& p, const std::string& key, const std::string& v) {
        const long long x = as_int(key, v);
        if (x < -2147483647LL || x > 2147483647LL) bad_type(key, "a 32-bit integer", v);
        member(p.run) = static_cast<int>(x);
      };
    };
    m["grid.geometry"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.run.grid.geometry = wrap(k, [&] { return geometry_from_string(as_string(v)); });
    };
    integer("grid.nx", [](RunConfig& r) -> int& { return r.grid.nx; });
    integer("grid.ny", [](RunConfig& r) -> int& { return r.grid.ny; });
    dbl("grid.lx", [](RunConfig& r) -> double& { return r.grid.lx; });
    dbl("grid.ly", [](RunConfig& r) -> double& { return r.grid.ly; });
    dbl("grid.wall_stretch", [](RunConfig& r) -> double& { return r.grid.wall_stretch; });
    m["model.kind"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.run.params.model = wrap(k, [&] { return model_from_string(as_string(v)); });
    };
    dbl("model.nu", [](RunConfig& r) -> double& { return r.params.nu; });
    dbl("model.lambda", [](RunConfig& r) -> double& { return r.params.lambda; });
    dbl("model.gamma", [](RunConfig& r) -> double& { return r.params.gamma; });
    dbl("model.epsilon", [](RunConfig& r) -> double& { return r.params.epsilon; });
    dbl("model.s_coupling", [](RunConfig& r) -> double& { return r.params.s_coupling; });
    dbl("model.re", [](RunConfig& r) -> double& { return r.params.re; });
    dbl("model.rm", [](RunConfig& r) -> double& { return r.params.rm; });
    m["model.wall_director"] = [](Parsed& p, const std::string& k, const std::string& v) {
      const auto l = as_list(k, v);
      if (l.size() != 2) bad_type(k, "a list of two numbers", v);
      p.run.params.wall_director = {l[0], l[1]};
    };
    m["scheme.kind"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.run.scheme.scheme = wrap(k, [&] { return scheme_from_string(as_string(v)); });
    };
    dbl("scheme.dt", [](RunConfig& r) -> double& { return r.scheme.dt; });
    dbl("scheme.cfl_target", [](RunConfig& r) -> double& { return r.scheme.cfl_target; });
    m["scheme.stabilizer_s0"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.run.scheme.stabilizer_s0 = as_double(k, v);
    };
    m["ic.recipe"] = [](Parsed& p, const std::string&, const std::string& v) {
      p.run.ic.recipe = as_string(v);
    };
    dbl("ic.amplitude", [](RunConfig& r) -> double& { return r.ic.amplitude; });
    dbl("ic.phase_amplitude", [](RunConfig& r) -> double& { return r.ic.phase_amplitude; });
    m["ic.seed"] = [](Parsed& p, const std::string& k, const std::string& v) {
      std::uint64_t x = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        bad_type(k, "a non-negative integer", v);
      }
      p.run.ic.seed = x;
    };
    integer("ic.modes", [](RunConfig& r) -> int& { return r.ic.modes; });
    dbl("T_final", [](RunConfig& r) -> double& { return r.T_final; });
    integer("sample_stride", [](RunConfig& r) -> int& { return r.sample_stride; });
    dbl("strip_constant", [](RunConfig& r) -> double& { return r.strip_constant; });
    m["output_dir"] = [](Parsed& p, const std::string&, const std::string& v) {
      p.run.output_dir = as_string(v);
    };
    m["sweep.nu_ladder"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.sweep.nu_ladder = as_list(k, v);
    };
    m["sweep.pairing"] = [](Parsed& p, const std::string&, const std::string& v) {
      p.sweep.pairing = pairing_from_string(as_string(v));
    };
    m["sweep.refined_reference"] = [](Parsed& p, const std::string& k, const std::string& v) {
      p.sweep.refined_reference = as_bool(k, v);
    };
    m["sweep.workers"] = [](Parsed& p, const std::string& k, const std::string& v) {
      const long long x = as_int(k, v);
      if (x < 1 || x > 4096) throw Error(ErrorKind::Config, k + ": must lie in [1, 4096]");
      p.sweep.workers = static_cast<int>(x);
    };
    return m;
  }();
  return s;
}

Parsed parse(std::string_view text) {
  Parsed p;
  std::map<std::string, int> seen;
  std::istringstream is{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config,
                  "line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(ErrorKind::Config, key + ": unknown key");
    if (seen.count(key)) {
      throw Error(ErrorKind::Config, key + ": set twice (lines " + std::to_string(seen[key]) +
                                         " and " + std::to_string(lineno) + ")");
    }
    seen[key] = lineno;
    if (value.empty()) throw Error(ErrorKind::Config, key + ": missing value");
    it->second(p, key, value);
    if (key.rfind("sweep.", 0) == 0) p.is_sweep = true;
  }
  for (const char* k : {"grid.geometry", "model.kind"}) {
    if (!seen.count(k)) throw Error(ErrorKind::Config, std::string(k) + ": required key missing");
  }
  if (p.is_sweep) {
    if (!seen.count("sweep.nu_ladder")) {
      throw Error(ErrorKind::Config, "sweep.nu_ladder: required key missing");
    }
    if (!seen.count("T_final")) {
      throw Error(ErrorKind::Config, "T_final: required key missing in a sweep config");
    }
  }
  // Torus grids default to a square 2 pi box; channels to the unit height.
  if (p.run.grid.geometry == Geometry::Channel && !seen.count("grid.ly")) p.run.grid.ly = 1.0;
  p.sweep.base = p.run;
  try {
    if (p.is_sweep) {
      p.sweep.validate();
    } else {
      p.run.validate();
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    throw Error(ErrorKind::Config, e.what());
  }
  return p;
}

void line(std::ostream& os, const char* key, const std::string& v) { os << key << " = " << v << '\n'; }
void line(std::ostream& os, const char* key, double v) { line(os, key, format_double(v)); }
void line(std::ostream& os, const char* key, int v) { line(os, key, std::to_string(v)); }

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

void echo_run(std::ostream& os, const RunConfig& c) {
  line(os, "grid.geometry", to_string(c.grid.geometry));
  line(os, "grid.nx", c.grid.nx);
  line(os, "grid.ny", c.grid.ny);
  line(os, "grid.lx", c.grid.lx);
  line(os, "grid.ly", c.grid.ly);
  line(os, "grid.wall_stretch", c.grid.wall_stretch);
  line(os, "model.kind", to_string(c.params.model));
  line(os, "model.nu", c.params.nu);
  line(os, "model.lambda", c.params.lambda);
  line(os, "model.gamma", c.params.gamma);
  line(os, "model.epsilon", c.params.epsilon);
  line(os, "model.s_coupling", c.params.s_coupling);
  line(os, "model.re", c.params.re);
  line(os, "model.rm", c.params.rm);
  line(os, "model.wall_director", list({c.params.wall_director[0], c.params.wall_director[1]}));
  line(os, "scheme.kind", to_string(c.scheme.scheme));
  line(os, "scheme.dt", c.scheme.dt);
  line(os, "scheme.cfl_target", c.scheme.cfl_target);
  if (c.scheme.stabilizer_s0) line(os, "scheme.stabilizer_s0", *c.scheme.stabilizer_s0);
  line(os, "ic.recipe", c.ic.recipe);
  line(os, "ic.amplitude", c.ic.amplitude);
  line(os, "ic.phase_amplitude", c.ic.phase_amplitude);
  line(os, "ic.seed", std::to_string(c.ic.seed));
  line(os, "ic.modes", c.ic.modes);
  line(os, "T_final", c.T_final);
  line(os, "sample_stride", c.sample_stride);
  line(os, "strip_constant", c.strip_constant);
  line(os, "output_dir", c.output_dir);
}

int env_workers() {
  const char* w = std::getenv("NSAC_WORKERS");
  if (!w) return 0;
  const std::string s(w);
  int x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || x < 1) {
    throw Error(ErrorKind::Config, "NSAC_WORKERS: expected a positive integer, got '" + s + "'");
  }
  return x;
}

}  // namespace

AnyConfig parse_config(std::string_view text) {
  Parsed p = parse(text);
  if (p.is_sweep) return p.sweep;
  return p.run;
}

RunConfig parse_run_config(std::string_view text) {
  Parsed p = parse(text);
  if (p.is_sweep) throw Error(ErrorKind::Config, "sweep.nu_ladder: not allowed in a run config");
  return p.run;
}

SweepConfig parse_sweep_config(std::string_view text) {
  Parsed p = parse(text);
  if (!p.is_sweep) throw Error(ErrorKind::Config, "sweep.nu_ladder: required key missing");
  return p.sweep;
}

AnyConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string echo(const RunConfig& c) {
  std::ostringstream os;
  echo_run(os, c);
  return os.str();
}

std::string echo(const SweepConfig& c) {
  std::ostringstream os;
  echo_run(os, c.base);
  line(os, "sweep.nu_ladder", list(c.nu_ladder));
  line(os, "sweep.pairing", to_string(c.pairing));
  line(os, "sweep.refined_reference", std::string(c.refined_reference ? "true" : "false"));
  line(os, "sweep.workers", c.workers);
  return os.str();
}

void apply_env_overrides(RunConfig& c) {
  if (const char* d = std::getenv("NSAC_OUTPUT_DIR"); d && *d) c.output_dir = d;
}

void apply_env_overrides(SweepConfig& c) {
  apply_env_overrides(c.base);
  if (const int w = env_workers()) c.workers = w;
}

}  // namespace nsac
