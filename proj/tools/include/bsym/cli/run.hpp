#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsym/cli/config.hpp"

namespace bsym::cli {

/// Output directory or artifact could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  /// Replaces RunConfig::output_dir.
  std::optional<std::filesystem::path> output_dir;
  /// Reserved; nothing in the pipeline is random. Recorded in the manifest when set.
  std::optional<long long> seed;
  /// liftcheck also prints its report to stdout.
  bool echo = true;
};

struct RunResult {
  /// 0 when every record succeeded, 1 otherwise.
  int exit_code = 0;
  std::size_t records = 0;
  std::size_t failed = 0;
  std::filesystem::path output_dir;
  /// Written files relative to output_dir, manifest.json last.
  std::vector<std::string> artifacts;
  nlohmann::json manifest;
};

/// FNV-1a 64-bit hash of the canonical dump of the parsed config, "fnv1a64:<hex>".
std::string config_hash(const RunConfig& config);

/// Executes the configured command and writes its artifacts plus manifest.json.
/// Per-record numerical failures are recorded, not thrown. Throws IoError.
RunResult run(const RunConfig& config, const RunOptions& options = {});

}  // namespace bsym::cli
