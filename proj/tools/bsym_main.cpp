#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsym/cli/config.hpp"
#include "bsym/cli/log.hpp"
#include "bsym/cli/run.hpp"
#include "bsym/version.hpp"

int main(int argc, char** argv) {
  using namespace bsym::cli;

  CLI::App app{"Hamiltonian dynamics on b-symplectic phase spaces"};
  app.set_version_flag("--version", bsym::kVersion);
  std::string command, config_path, out_dir;
  long long seed = 0;
  app.add_option("command", command, "simulate | portrait | classify | oracle-compare | timescale | liftcheck")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "reserved; recorded in the manifest");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto cmd = command_from_string(command);
  if (!cmd) {
    std::cerr << "bsym: unknown command '" << command << "'\n";
    return 2;
  }

  RunConfig config;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read " + config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = parse_config(text.str());
    if (config.command != *cmd)
      throw ConfigError("command", "config is for '" + std::string(to_string(config.command)) + "', not '" + command +
                                       "'");
  } catch (const ConfigError& e) {
    std::cerr << "bsym: config error: " << e.what() << '\n';
    return 2;
  }

  RunOptions options;
  if (*out_opt) options.output_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  try {
    const RunResult result = run(config, options);
    log(LogLevel::info, std::to_string(result.records) + " records, " + std::to_string(result.failed) + " failed");
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "bsym: " << e.what() << '\n';
    return 1;
  }
}
