#include "bsym/cli/run.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "bsym/bsym.hpp"
#include "bsym/cli/json_text.hpp"
#include "bsym/cli/log.hpp"

namespace bsym::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string numbered(const char* prefix, std::size_t index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", prefix, index, suffix);
  return buf;
}

json numbers(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

json state_json(const PhaseState& s) {
  json j = {{"q", numbers(s.q())}, {"p", numbers(s.p())}};
  if (s.extended()) {
    j["ext_position"] = s.ext_position();
    j["ext_momentum"] = s.ext_momentum();
  }
  return j;
}

json classification_json(const OrbitClassification& c) {
  json j = {{"kind", std::string(to_string(c.kind))}};
  if (c.period) j["period"] = *c.period;
  if (c.limit_state) j["limit_state"] = state_json(*c.limit_state);
  return j;
}

void terminal_json(json& record, const Trajectory& traj, const char* prefix = "") {
  if (traj.events.empty()) return;
  const Event& e = traj.terminal();
  record[std::string(prefix) + "terminal_event"] = std::string(to_string(e.kind));
  record[std::string(prefix) + "terminal_time"] = e.time;
}

json record_base(std::size_t index, const PhaseState& initial) {
  return {{"index", index}, {"initial", state_json(initial)}, {"status", "ok"}};
}

void mark_failed(json& record, const std::string& message) {
  record["status"] = "error";
  record["error"] = message;
}

std::string csv_text(const Trajectory& traj, const io::CsvOptions& options = {}) {
  std::ostringstream out;
  io::write_trajectory_csv(out, traj, options);
  return out.str();
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw IoError("cannot write " + path.string());
    log(LogLevel::debug, "wrote " + name);
    names_.push_back(name);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// simulate / classify

std::vector<json> run_simulate(const RunConfig& cfg, ArtifactWriter& out, bool classify) {
  std::vector<json> records;
  json classes = json::array();
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    json rec = record_base(i, cfg.initial[i]);
    try {
      const Trajectory traj = integrate(cfg.structure, cfg.hamiltonian, cfg.initial[i], cfg.integrator);
      terminal_json(rec, traj);
      if (classify) {
        ClassifyOptions opts = cfg.classify;
        opts.fp_epsilon = cfg.integrator.fp_epsilon;
        const json c = classification_json(classify_orbit(traj, cfg.structure, cfg.hamiltonian, opts));
        rec["classification"] = c;
        classes.push_back({{"index", i}, {"classification", c}});
      }
      const std::string name = numbered("traj", i, ".csv");
      out.write(name, csv_text(traj));
      rec["files"] = {name};
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      mark_failed(rec, e.what());
      if (classify) classes.push_back({{"index", i}, {"error", e.what()}});
    }
    records.push_back(std::move(rec));
  }
  if (classify) out.write("classifications.json", json_text(classes));
  return records;
}

// ---------------------------------------------------------------------------
// portrait

std::vector<json> run_portrait(const RunConfig& cfg, ArtifactWriter& out) {
  ClassifyOptions opts = cfg.classify;
  opts.fp_epsilon = cfg.integrator.fp_epsilon;
  const auto portrait = phase_portrait(cfg.structure, cfg.hamiltonian, cfg.initial, cfg.integrator, opts);
  std::vector<json> records;
  json index = json::array();
  for (std::size_t i = 0; i < portrait.size(); ++i) {
    const PortraitRecord& r = portrait[i];
    json rec = record_base(i, r.initial);
    if (r.error) {
      mark_failed(rec, *r.error);
      index.push_back({{"index", i}, {"error", *r.error}});
    } else {
      const std::string fwd = numbered("orbit", i, "_forward.csv");
      const std::string bwd = numbered("orbit", i, "_backward.csv");
      out.write(fwd, csv_text(r.forward));
      out.write(bwd, csv_text(r.backward));
      terminal_json(rec, r.forward);
      terminal_json(rec, r.backward, "backward_");
      rec["classification"] = classification_json(r.classification);
      rec["backward_classification"] = classification_json(r.backward_classification);
      rec["files"] = {fwd, bwd};
      index.push_back({{"index", i},
                       {"initial", state_json(r.initial)},
                       {"forward", fwd},
                       {"backward", bwd},
                       {"classification", rec["classification"]},
                       {"backward_classification", rec["backward_classification"]}});
    }
    records.push_back(std::move(rec));
  }
  out.write("index.json", json_text(index));
  return records;
}

// ---------------------------------------------------------------------------
// oracle-compare

struct Oracle {
  std::string name;
  std::function<std::pair<double, double>(double)> at;
};

Oracle pick_oracle(const RunConfig& cfg, const PhaseState& x0) {
  const PhaseStructure& s = cfg.structure;
  const PotentialSpec& v = cfg.potential;
  if (s.n != 1 || s.is_angular(0)) throw DomainError("oracles are defined for n = 1 without angles");
  const double q0 = x0.q(0), p0 = x0.p(0), lam = v.lambda;
  if (s.kind == StructureKind::canonical && v.family == PotentialFamily::linear)
    return {"classical_parabola", [=](double t) { return oracles::classical_parabola(q0, p0, lam, t); }};
  if (s.kind == StructureKind::twisted_b && s.modular_weight == 1.0) {
    if (v.family == PotentialFamily::linear)
      return {"stokes_exact", [=](double t) { return oracles::stokes_exact(q0, p0, lam, t); }};
    if (v.family == PotentialFamily::pure_quadratic && p0 != 0.0) {
      // H = p^2/2 + lam q^2/4 = c1^2/4 fixes c1; q0 fixes c2; p keeps its sign.
      const double c1 = std::sqrt(2.0 * p0 * p0 + lam * q0 * q0);
      const double c2 = std::atanh(std::sqrt(lam) * q0 / c1);
      const double sign = p0 > 0.0 ? 1.0 : -1.0;
      return {"quadratic_tanh", [=](double t) {
                const double arg = c1 * std::sqrt(lam) * t / 2.0 + c2;
                return std::pair{oracles::quadratic_tanh(c1, c2, lam, t), sign * c1 / std::sqrt(2.0) / std::cosh(arg)};
              }};
    }
  }
  throw DomainError("no reference solution for structure " + std::string(to_string(s.kind)) + " with potential " +
                    std::string(to_string(v.family)));
}

std::vector<json> run_oracle_compare(const RunConfig& cfg, ArtifactWriter& out) {
  std::vector<json> records;
  json summary = json::array();
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    json rec = record_base(i, cfg.initial[i]);
    try {
      const Oracle oracle = pick_oracle(cfg, cfg.initial[i]);
      const Trajectory traj = integrate(cfg.structure, cfg.hamiltonian, cfg.initial[i], cfg.integrator);
      terminal_json(rec, traj);
      std::string csv = "t,q,p,q_ref,p_ref,error\n";
      double worst = 0.0;
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto [qr, pr] = oracle.at(traj.times[k]);
        const double q = traj.states[k].q(0), p = traj.states[k].p(0);
        const double err = std::max(std::abs(q - qr), std::abs(p - pr));
        worst = std::max(worst, err);
        csv += io::format_double(traj.times[k]) + ',' + io::format_double(q) + ',' + io::format_double(p) + ',' +
               io::format_double(qr) + ',' + io::format_double(pr) + ',' + io::format_double(err) + '\n';
      }
      csv += "# event: " + std::string(to_string(traj.terminal().kind)) + " at t=" +
             io::format_double(traj.terminal().time) + '\n';
      const std::string name = numbered("compare", i, ".csv");
      out.write(name, csv);
      rec["files"] = {name};
      rec["oracle"] = oracle.name;
      rec["max_error"] = worst;
      summary.push_back({{"index", i}, {"oracle", oracle.name}, {"max_error", worst}});
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      mark_failed(rec, e.what());
      summary.push_back({{"index", i}, {"error", e.what()}});
    }
    records.push_back(std::move(rec));
  }
  out.write("oracle_summary.json", json_text(summary));
  return records;
}

// ---------------------------------------------------------------------------
// timescale

// H starts at 0 and its terms grow like e^{2 lambda t}, so drift is reported
// against the size of the energy term.
double relative_drift(const timescale::ExtendedTrajectory& ext, const HamiltonianSpec& h) {
  double scale = 1.0;
  for (const PhaseState& x : ext.base.states) {
    const double term = ext.chart == timescale::Chart::time_energy
                            ? std::exp(ext.lambda * x.ext_position()) / ext.lambda * x.ext_momentum()
                            : x.ext_momentum() / x.ext_position();
    scale = std::max(scale, std::abs(term));
  }
  return level_set_residual(ext.base, h) / scale;
}

std::vector<json> run_timescale(const RunConfig& cfg, ArtifactWriter& out) {
  const TimescaleSettings& ts = cfg.timescale;
  const double lam = ts.lambda;
  const timescale::ExtendedSystem rescaled = timescale::build_rescaled_extended(cfg.potential, lam, 1);
  const bool s_chart = ts.chart == "s_energy";
  const timescale::ExtendedSystem system =
      s_chart ? timescale::to_s_coordinates(rescaled.structure, rescaled.hamiltonian, lam) : rescaled;
  const timescale::CurvilinearOptions opts{ts.horizon, ts.sample_dt, ts.substeps};

  std::vector<json> records;
  json summary = json::array();
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    json rec = record_base(i, cfg.initial[i]);
    try {
      const PhaseState& init = cfg.initial[i];
      PhaseState x0 = timescale::rescaled_initial_state(rescaled.hamiltonian, init.q(), init.p(), 0.0);
      if (ts.energy) x0 = PhaseState({init.q(0)}, {x0.p(0)}, 0.0, *ts.energy);
      if (s_chart) x0 = timescale::to_s_state(x0, lam);

      timescale::ExtendedTrajectory ext = timescale::integrate_curvilinear(system, x0, lam, opts);
      const Trajectory real = timescale::reconstruct_real_time(ext);
      const auto ref = oracles::damped_newton_reference(cfg.potential, lam, init.q(0), init.p(0), real.times);
      double deviation = 0.0;
      for (std::size_t k = 0; k < real.size(); ++k) {
        deviation = std::max(deviation, std::abs(real.states[k].q(0) - ref.states[k].q(0)));
        deviation = std::max(deviation, std::abs(real.states[k].p(0) - ref.states[k].p(0)));
      }
      const double residual = timescale::friction_residual(real, cfg.potential, lam);

      Trajectory written = ext.base;
      if (ts.clock == "t") {
        written.times = real.times;
        for (Event& e : written.events) e.time = real.times.back();
      }
      io::CsvOptions csv;
      if (s_chart) {
        csv.ext_position_name = "s";
        csv.ext_momentum_name = "E_s";
      }
      csv.clock = ts.clock;
      const std::string name = numbered("timescale", i, ".csv");
      out.write(name, csv_text(written, csv));

      terminal_json(rec, written);
      rec["files"] = {name};
      json s = {{"index", i},
                {"chart", ts.chart},
                {"clock", ts.clock},
                {"final_time", real.times.back()},
                {"final_position", real.back().q(0)},
                {"final_velocity", real.back().p(0)},
                {"max_deviation_from_reference", deviation},
                {"friction_residual", residual},
                {"relative_hamiltonian_drift", relative_drift(ext, system.hamiltonian)}};
      rec["summary"] = s;
      summary.push_back(std::move(s));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      mark_failed(rec, e.what());
      summary.push_back({{"index", i}, {"error", e.what()}});
    }
    records.push_back(std::move(rec));
  }
  out.write("timescale_summary.json", json_text(summary));
  return records;
}

// ---------------------------------------------------------------------------
// liftcheck

std::vector<json> run_liftcheck(const RunConfig& cfg, ArtifactWriter& out, bool echo) {
  const LiftcheckSettings& lc = cfg.liftcheck;
  json rec = {{"index", 0}, {"status", "ok"}};
  json report;
  try {
    const HamiltonianSpec h = lc.hamiltonian == "toric"
                                  ? toric_moment_field(cfg.structure, cfg.structure.modular_weight)
                                  : cfg.hamiltonian;
    const LiftVerdict v = projectability_test(cfg.structure, h, lc.base_points, lc.fibers, lc.tol);
    report = {{"structure", structure_id(cfg.structure)},
              {"hamiltonian", h.id()},
              {"tol", lc.tol},
              {"verdict", std::string(to_string(v.verdict))}};
    if (v.witness)
      report["witness"] = {{"first", state_json(v.witness->first)},
                           {"second", state_json(v.witness->second)},
                           {"difference", v.witness->difference}};
    rec["verdict"] = report["verdict"];
  } catch (const std::exception& e) {
    mark_failed(rec, e.what());
    report = {{"error", e.what()}};
  }
  const std::string text = json_text(report);
  out.write("liftcheck.json", text);
  if (echo) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
  }
  rec["files"] = {"liftcheck.json"};
  return {rec};
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : config.source.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
  return buf;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  ArtifactWriter out(options.output_dir ? *options.output_dir : fs::path(config.output_dir));
  for (const auto& w : config.warnings) log(LogLevel::warn, w);
  log(LogLevel::info, "running " + std::string(to_string(config.command)));

  std::vector<json> records;
  switch (config.command) {
    case Command::simulate:
      records = run_simulate(config, out, false);
      break;
    case Command::classify:
      records = run_simulate(config, out, true);
      break;
    case Command::portrait:
      records = run_portrait(config, out);
      break;
    case Command::oracle_compare:
      records = run_oracle_compare(config, out);
      break;
    case Command::timescale:
      records = run_timescale(config, out);
      break;
    case Command::liftcheck:
      records = run_liftcheck(config, out, options.echo);
      break;
  }

  RunResult result;
  result.records = records.size();
  for (const json& r : records) {
    if (r.at("status") != "ok") {
      ++result.failed;
      log(LogLevel::warn, "record " + r.at("index").dump() + " failed: " + r.at("error").get<std::string>());
    }
  }
  result.exit_code = result.failed == 0 ? 0 : 1;

  json manifest = {{"tool", "bsym"},
                   {"library_version", kVersion},
                   {"config_hash", config_hash(config)},
                   {"command", std::string(to_string(config.command))},
                   {"warnings", config.warnings},
                   {"records", records},
                   {"artifacts", out.names()},
                   {"summary", {{"records", result.records}, {"failed", result.failed}}}};
  if (options.seed) manifest["seed"] = *options.seed;
  out.write("manifest.json", json_text(manifest));

  result.output_dir = out.dir();
  result.artifacts = out.names();
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace bsym::cli
