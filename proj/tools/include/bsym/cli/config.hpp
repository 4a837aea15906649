#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsym/geometry.hpp"
#include "bsym/hamiltonians.hpp"
#include "bsym/integrate.hpp"
#include "bsym/orbits.hpp"

namespace bsym::cli {

enum class Command { simulate, portrait, classify, oracle_compare, timescale, liftcheck };

std::string_view to_string(Command command);
std::optional<Command> command_from_string(std::string_view name);

/// Invalid configuration. `path()` names the offending key, e.g. "potential.lambda".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct TimescaleSettings {
  double lambda = 1.0;
  /// "t" writes the real-time reconstruction, "s" the curvilinear samples.
  std::string clock = "t";
  /// Integration chart: "time_energy" (t, E) or "s_energy" (s, E_s).
  std::string chart = "time_energy";
  double horizon = 10.0;
  double sample_dt = 1e-2;
  std::size_t substeps = 10;
  /// Overrides the initial E (t chart units); by default E makes H = 0.
  std::optional<double> energy;
};

struct LiftcheckSettings {
  std::vector<std::vector<double>> base_points;
  std::vector<std::vector<double>> fibers;
  double tol = 1e-9;
  /// "system" tests the configured Hamiltonian, "toric" the toric moment map.
  std::string hamiltonian = "system";
};

struct RunConfig {
  Command command = Command::simulate;
  PhaseStructure structure;
  PotentialSpec potential;
  HamiltonianSpec hamiltonian;
  /// For the timescale command, p holds the initial real-time velocity.
  std::vector<PhaseState> initial;
  IntegratorConfig integrator;
  ClassifyOptions classify;
  TimescaleSettings timescale;
  LiftcheckSettings liftcheck;
  std::string output_dir = "out";
  /// Benign issues found while parsing, recorded in the manifest.
  std::vector<std::string> warnings;
  /// The parsed input document, hashed into the manifest.
  nlohmann::json source;
};

/// Parses and validates a JSON run configuration. Throws ConfigError.
RunConfig parse_config(std::string_view text);

}  // namespace bsym::cli
