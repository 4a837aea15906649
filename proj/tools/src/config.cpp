#include "bsym/cli/config.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

#include "bsym/errors.hpp"

namespace bsym::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!keys.contains(key)) throw ConfigError(join(path, key), "unknown key");
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), join(path, key)) : fallback;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
  return j.get<std::size_t>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> vector_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], index_path(path, i)));
  return out;
}

std::vector<std::vector<double>> matrix_of(const json& j, const std::string& path, std::size_t width) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of coordinate vectors");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vector_of(j[i], index_path(path, i)));
    if (out.back().size() != width)
      throw ConfigError(index_path(path, i), "expected " + std::to_string(width) + " coordinates");
  }
  return out;
}

// ---------------------------------------------------------------------------

PhaseStructure parse_structure(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"kind", "n", "c", "singular_index", "angular"});
  PhaseStructure s;
  if (!j.contains("kind")) throw ConfigError(join(path, "kind"), "missing");
  try {
    s.kind = structure_kind_from_string(text(j.at("kind"), join(path, "kind")));
  } catch (const DomainError& e) {
    throw ConfigError(join(path, "kind"), e.what());
  }
  if (s.is_extended())
    throw ConfigError(join(path, "kind"), "extended structures are built by the timescale command");
  if (j.contains("n")) s.n = count(j.at("n"), join(path, "n"));
  if (s.n == 0) throw ConfigError(join(path, "n"), "must be at least 1");
  s.modular_weight = number_or(j, path, "c", 1.0);
  if (s.modular_weight == 0.0) throw ConfigError(join(path, "c"), "modular weight must be nonzero");
  if (j.contains("singular_index")) {
    s.singular_index = count(j.at("singular_index"), join(path, "singular_index"));
    if (s.singular_index >= s.n) throw ConfigError(join(path, "singular_index"), "out of range");
  }
  if (j.contains("angular")) {
    const auto& a = j.at("angular");
    const std::string ap = join(path, "angular");
    if (!a.is_array() || a.size() != s.n) throw ConfigError(ap, "expected one boolean per position");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_boolean()) throw ConfigError(index_path(ap, i), "expected a boolean");
      s.angular_mask.push_back(a[i].get<bool>());
    }
  }
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return s;
}

PotentialSpec parse_potential(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"family", "lambda", "alpha"});
  PotentialSpec v;
  if (!j.contains("family")) throw ConfigError(join(path, "family"), "missing");
  try {
    v.family = potential_family_from_string(text(j.at("family"), join(path, "family")));
  } catch (const DomainError& e) {
    throw ConfigError(join(path, "family"), e.what());
  }
  if (v.family == PotentialFamily::custom)
    throw ConfigError(join(path, "family"), "custom potentials are only available through the library");
  if (j.contains("alpha")) {
    if (v.family != PotentialFamily::general_quadratic)
      throw ConfigError(join(path, "alpha"), "alpha is only valid with family general_quadratic");
    v.alpha = number(j.at("alpha"), join(path, "alpha"));
  }
  if (v.family == PotentialFamily::zero) {
    if (j.contains("lambda")) throw ConfigError(join(path, "lambda"), "the zero potential takes no lambda");
  } else {
    if (!j.contains("lambda")) throw ConfigError(join(path, "lambda"), "missing");
    v.lambda = number(j.at("lambda"), join(path, "lambda"));
    if (!(v.lambda > 0.0)) throw ConfigError(join(path, "lambda"), "must be positive");
  }
  return v;
}

std::vector<double> expand_range(const json& j, const std::string& path) {
  expect_object(j, path);
  if (j.contains("values")) {
    reject_unknown(j, path, {"values"});
    auto v = vector_of(j.at("values"), join(path, "values"));
    if (v.empty()) throw ConfigError(join(path, "values"), "must not be empty");
    return v;
  }
  reject_unknown(j, path, {"min", "max", "count"});
  for (const char* key : {"min", "max", "count"})
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing");
  const double lo = number(j.at("min"), join(path, "min"));
  const double hi = number(j.at("max"), join(path, "max"));
  const std::size_t n = count(j.at("count"), join(path, "count"));
  if (n == 0) throw ConfigError(join(path, "count"), "must be at least 1");
  if (n > 1 && !(hi > lo)) throw ConfigError(join(path, "max"), "must exceed min");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::vector<PhaseState> parse_initial(const json& j, const std::string& path, std::size_t n) {
  expect_object(j, path);
  reject_unknown(j, path, {"points", "grid"});
  std::vector<PhaseState> out;
  if (j.contains("points")) {
    const auto& pts = j.at("points");
    const std::string pp = join(path, "points");
    if (!pts.is_array()) throw ConfigError(pp, "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string ip = index_path(pp, i);
      expect_object(pts[i], ip);
      reject_unknown(pts[i], ip, {"q", "p"});
      if (!pts[i].contains("q")) throw ConfigError(join(ip, "q"), "missing");
      if (!pts[i].contains("p")) throw ConfigError(join(ip, "p"), "missing");
      auto q = vector_of(pts[i].at("q"), join(ip, "q"));
      auto p = vector_of(pts[i].at("p"), join(ip, "p"));
      if (q.size() != n) throw ConfigError(join(ip, "q"), "expected " + std::to_string(n) + " coordinates");
      if (p.size() != n) throw ConfigError(join(ip, "p"), "expected " + std::to_string(n) + " coordinates");
      out.emplace_back(std::move(q), std::move(p));
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    const std::string gp = join(path, "grid");
    expect_object(g, gp);
    reject_unknown(g, gp, {"q", "p"});
    std::vector<std::vector<double>> axes;
    for (const char* key : {"q", "p"}) {
      const std::string kp = join(gp, key);
      if (!g.contains(key)) throw ConfigError(kp, "missing");
      const auto& ranges = g.at(key);
      if (!ranges.is_array() || ranges.size() != n)
        throw ConfigError(kp, "expected one range per coordinate (" + std::to_string(n) + ")");
      for (std::size_t i = 0; i < n; ++i) axes.push_back(expand_range(ranges[i], index_path(kp, i)));
    }
    // Cartesian product, first coordinate varying slowest.
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      std::vector<double> q(n), p(n);
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = axes[i][idx[i]];
        p[i] = axes[n + i][idx[n + i]];
      }
      out.emplace_back(std::move(q), std::move(p));
      std::size_t a = axes.size();
      while (a > 0) {
        --a;
        if (++idx[a] < axes[a].size()) break;
        idx[a] = 0;
        if (a == 0) return out;
      }
    }
  }
  return out;
}

IntegratorConfig parse_integrator(const json& j, const std::string& path, bool singular,
                                  std::vector<std::string>& warnings) {
  expect_object(j, path);
  reject_unknown(j, path,
                 {"method", "step", "t_max", "rel_tol", "abs_tol", "z_epsilon", "fp_epsilon", "blowup_bound"});
  IntegratorConfig c;
  if (j.contains("method")) {
    try {
      c.method = method_from_string(text(j.at("method"), join(path, "method")));
    } catch (const DomainError& e) {
      throw ConfigError(join(path, "method"), e.what());
    }
  }
  c.step = number_or(j, path, "step", c.step);
  c.t_max = number_or(j, path, "t_max", c.t_max);
  c.rel_tol = number_or(j, path, "rel_tol", c.rel_tol);
  c.abs_tol = number_or(j, path, "abs_tol", c.abs_tol);
  c.z_epsilon = number_or(j, path, "z_epsilon", c.z_epsilon);
  c.fp_epsilon = number_or(j, path, "fp_epsilon", c.fp_epsilon);
  c.blowup_bound = number_or(j, path, "blowup_bound", c.blowup_bound);
  if (!singular && j.contains("z_epsilon"))
    warnings.push_back(join(path, "z_epsilon") + " ignored: structure has no critical set");
  if (c.method == Method::rk4_fixed)
    for (const char* key : {"rel_tol", "abs_tol"})
      if (j.contains(key)) warnings.push_back(join(path, key) + " ignored by rk4_fixed");
  for (const char* key : {"step", "t_max", "rel_tol", "abs_tol", "z_epsilon", "fp_epsilon", "blowup_bound"}) {
    if (j.contains(key) && !(j.at(key).get<double>() > 0.0)) throw ConfigError(join(path, key), "must be positive");
  }
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return c;
}

ClassifyOptions parse_classify(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"return_radius", "min_period", "separatrix_guard"});
  ClassifyOptions o;
  o.return_radius = number_or(j, path, "return_radius", o.return_radius);
  o.min_period = number_or(j, path, "min_period", o.min_period);
  o.separatrix_guard = number_or(j, path, "separatrix_guard", o.separatrix_guard);
  if (!(o.return_radius > 0.0)) throw ConfigError(join(path, "return_radius"), "must be positive");
  if (o.min_period < 0.0) throw ConfigError(join(path, "min_period"), "must be non-negative");
  if (o.separatrix_guard < 0.0) throw ConfigError(join(path, "separatrix_guard"), "must be non-negative");
  return o;
}

TimescaleSettings parse_timescale(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown(j, path, {"lambda", "clock", "chart", "horizon", "sample_dt", "substeps", "energy"});
  TimescaleSettings t;
  if (!j.contains("lambda")) throw ConfigError(join(path, "lambda"), "missing");
  t.lambda = number(j.at("lambda"), join(path, "lambda"));
  if (!(t.lambda > 0.0)) throw ConfigError(join(path, "lambda"), "must be positive");
  if (j.contains("clock")) t.clock = text(j.at("clock"), join(path, "clock"));
  if (t.clock != "t" && t.clock != "s") throw ConfigError(join(path, "clock"), "expected \"t\" or \"s\"");
  if (j.contains("chart")) t.chart = text(j.at("chart"), join(path, "chart"));
  if (t.chart != "time_energy" && t.chart != "s_energy")
    throw ConfigError(join(path, "chart"), "expected \"time_energy\" or \"s_energy\"");
  t.horizon = number_or(j, path, "horizon", t.horizon);
  t.sample_dt = number_or(j, path, "sample_dt", t.sample_dt);
  if (j.contains("substeps")) t.substeps = count(j.at("substeps"), join(path, "substeps"));
  if (!(t.horizon > 0.0)) throw ConfigError(join(path, "horizon"), "must be positive");
  if (!(t.sample_dt > 0.0) || t.sample_dt > t.horizon) throw ConfigError(join(path, "sample_dt"), "must be in (0, horizon]");
  if (t.substeps == 0) throw ConfigError(join(path, "substeps"), "must be at least 1");
  if (j.contains("energy")) t.energy = number(j.at("energy"), join(path, "energy"));
  if (t.lambda * t.horizon > 700.0 && t.chart == "time_energy")
    throw ConfigError(join(path, "horizon"), "lambda * horizon exceeds 700; use chart s_energy");
  return t;
}

LiftcheckSettings parse_liftcheck(const json& j, const std::string& path, std::size_t n) {
  expect_object(j, path);
  reject_unknown(j, path, {"base_points", "fibers", "tol", "hamiltonian"});
  LiftcheckSettings l;
  l.base_points = j.contains("base_points") ? matrix_of(j.at("base_points"), join(path, "base_points"), n)
                                            : std::vector<std::vector<double>>{std::vector<double>(n, 0.0)};
  if (j.contains("fibers")) {
    l.fibers = matrix_of(j.at("fibers"), join(path, "fibers"), n);
  } else {
    l.fibers = {std::vector<double>(n, 1.0), std::vector<double>(n, 2.0)};
  }
  if (l.base_points.empty()) throw ConfigError(join(path, "base_points"), "must not be empty");
  if (l.fibers.size() < 2) throw ConfigError(join(path, "fibers"), "at least two fiber samples are required");
  l.tol = number_or(j, path, "tol", l.tol);
  if (l.tol < 0.0) throw ConfigError(join(path, "tol"), "must be non-negative");
  if (j.contains("hamiltonian")) l.hamiltonian = text(j.at("hamiltonian"), join(path, "hamiltonian"));
  if (l.hamiltonian != "system" && l.hamiltonian != "toric")
    throw ConfigError(join(path, "hamiltonian"), "expected \"system\" or \"toric\"");
  return l;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::simulate:
      return "simulate";
    case Command::portrait:
      return "portrait";
    case Command::classify:
      return "classify";
    case Command::oracle_compare:
      return "oracle-compare";
    case Command::timescale:
      return "timescale";
    case Command::liftcheck:
      return "liftcheck";
  }
  return "unknown";
}

std::optional<Command> command_from_string(std::string_view name) {
  for (auto c : {Command::simulate, Command::portrait, Command::classify, Command::oracle_compare, Command::timescale,
                 Command::liftcheck})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

RunConfig parse_config(std::string_view input) {
  json doc;
  try {
    doc = json::parse(input.begin(), input.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  expect_object(doc, "");
  reject_unknown(doc, "",
                 {"command", "structure", "potential", "initial", "integrator", "classify", "timescale", "liftcheck",
                  "output"});

  RunConfig cfg;
  cfg.source = doc;
  if (!doc.contains("command")) throw ConfigError("command", "missing");
  const auto command = command_from_string(text(doc.at("command"), "command"));
  if (!command) throw ConfigError("command", "unknown command '" + doc.at("command").get<std::string>() + "'");
  cfg.command = *command;

  const bool timescale = cfg.command == Command::timescale;
  if (timescale) {
    if (doc.contains("structure")) cfg.warnings.push_back("structure ignored: timescale builds extended structures");
    if (doc.contains("integrator")) cfg.warnings.push_back("integrator ignored: timescale uses its own settings");
    if (!doc.contains("timescale")) throw ConfigError("timescale", "missing");
    cfg.timescale = parse_timescale(doc.at("timescale"), "timescale");
  } else {
    if (doc.contains("timescale")) throw ConfigError("timescale", "only valid with command timescale");
    if (!doc.contains("structure")) throw ConfigError("structure", "missing");
    cfg.structure = parse_structure(doc.at("structure"), "structure");
  }
  const std::size_t n = timescale ? 1 : cfg.structure.n;

  if (!doc.contains("potential")) throw ConfigError("potential", "missing");
  cfg.potential = parse_potential(doc.at("potential"), "potential");
  cfg.hamiltonian = HamiltonianSpec::mechanical(cfg.potential, n);

  if (doc.contains("integrator") && !timescale)
    cfg.integrator = parse_integrator(doc.at("integrator"), "integrator", cfg.structure.singular(), cfg.warnings);
  if (doc.contains("classify")) cfg.classify = parse_classify(doc.at("classify"), "classify");

  if (cfg.command == Command::liftcheck) {
    if (doc.contains("initial")) cfg.warnings.push_back("initial ignored by liftcheck");
    cfg.liftcheck = parse_liftcheck(doc.contains("liftcheck") ? doc.at("liftcheck") : json::object(), "liftcheck", n);
    if (cfg.liftcheck.hamiltonian == "toric" && cfg.structure.kind != StructureKind::twisted_b)
      throw ConfigError("liftcheck.hamiltonian", "the toric control needs a twisted_b structure");
  } else {
    if (doc.contains("liftcheck")) throw ConfigError("liftcheck", "only valid with command liftcheck");
    if (!doc.contains("initial")) throw ConfigError("initial", "missing");
    cfg.initial = parse_initial(doc.at("initial"), "initial", n);
    if (cfg.initial.empty()) throw ConfigError("initial", "expands to no initial conditions");
  }

  if (doc.contains("output")) cfg.output_dir = text(doc.at("output"), "output");
  if (cfg.output_dir.empty()) throw ConfigError("output", "must not be empty");
  return cfg;
}

}  // namespace bsym::cli
