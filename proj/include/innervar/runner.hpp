#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace innervar {

inline constexpr int kSummaryFormatVersion = 1;

/// One named comparison; `at_least` flips the sense of the bound.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool at_least = false;
  bool pass = false;

  nlohmann::json to_json() const;
};

struct CaseResult {
  std::string name;
  /// epsilon,value,target,gap,residual_1,residual_2
  std::string csv;
  std::vector<Check> checks;
  nlohmann::json record;
  nlohmann::json details = nlohmann::json::object();
  std::string error;
  bool pass = false;
  double seconds = 0.0;

  nlohmann::json summary() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  /// 0 keeps the current worker count.
  int jobs = 0;
};

struct RunResult {
  std::string name;
  std::string kind;
  std::string description;
  std::uint64_t seed = 0;
  std::vector<CaseResult> cases;
  bool pass = false;
  double seconds = 0.0;

  nlohmann::json summary() const;
};

/// Experiment kinds accepted in the "kind" key.
const std::vector<std::string>& experiment_kinds();

/// Validates the whole config, then runs its cases in order. Throws
/// Error(ConfigError) for schema problems; numerical errors inside a case
/// mark that case failed and name it.
RunResult run_config(const nlohmann::json& config, const RunOptions& options = {});

/// Parses `text` (ConfigError on malformed JSON) and runs it; `fallback_name`
/// is used when the config has no "name".
RunResult run_config_text(const std::string& text, const std::string& fallback_name, const RunOptions& options = {});

/// <dir>/<case>.csv for each case and <dir>/summary.json, each written to a
/// temporary file and renamed into place.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace innervar
