#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "innervar/innervar.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

int exit_for_status(int status) { return status == INNERVAR_CONFIG_ERROR ? kExitConfig : kExitFail; }

std::optional<int> builtin_index(const std::string& name) {
  for (std::size_t i = 0; i < innervar_builtin_count(); ++i)
    if (name == innervar_builtin_name(i)) return static_cast<int>(i);
  return std::nullopt;
}

void report(const innervar_result* r, const std::filesystem::path& dir) {
  const auto summary = nlohmann::json::parse(innervar_result_summary(r));
  for (const auto& c : summary.at("cases")) {
    std::string line = (c.at("pass").get<bool>() ? "PASS " : "FAIL ") + c.at("name").get<std::string>();
    if (c.contains("record")) {
      const auto& rec = c.at("record");
      char buf[160];
      std::snprintf(buf, sizeof buf, "  extrapolated=%.8g target=%.8g gap=%.3e", rec.at("extrapolated").get<double>(),
                    rec.at("target").get<double>(), rec.at("gap").get<double>());
      line += buf;
    }
    for (const auto& chk : c.at("checks"))
      if (!chk.at("pass").get<bool>()) line += "  [" + chk.at("name").get<std::string>() + "]";
    if (c.contains("error")) line += "  " + c.at("error").get<std::string>();
    std::cout << line << '\n';
  }
  std::cout << innervar_result_name(r) << ": " << (innervar_result_pass(r) ? "pass" : "fail") << ", "
            << (dir / "summary.json").string() << '\n';
}

int run_one(const std::string& target, const std::filesystem::path& dir, const innervar_run_options& opts) {
  innervar_result* r = nullptr;
  int status;
  if (std::filesystem::is_regular_file(target))
    status = innervar_run_file(target.c_str(), &opts, &r);
  else if (builtin_index(target))
    status = innervar_run_builtin(target.c_str(), &opts, &r);
  else
    status = innervar_run_file(target.c_str(), &opts, &r);
  if (status != INNERVAR_OK) {
    std::cerr << "error: " << innervar_last_error() << '\n';
    return exit_for_status(status);
  }
  const std::filesystem::path out = dir.empty() ? std::filesystem::path("results") / innervar_result_name(r) : dir;
  status = innervar_result_write(r, out.string().c_str());
  if (status != INNERVAR_OK) {
    std::cerr << "error: " << innervar_last_error() << '\n';
    innervar_result_free(r);
    return exit_for_status(status);
  }
  report(r, out);
  const int code = innervar_result_pass(r) ? kExitPass : kExitFail;
  innervar_result_free(r);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inner variations of phase-field and vortex energies: experiment runner"};
  app.require_subcommand(1);

  std::string target, out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment config (a path, a built-in name, or 'all')");
  run->add_option("config", target, "Config file, built-in experiment name, or 'all'")->required();
  run->add_option("--out", out_dir, "Output directory (default results/<name>)");
  run->add_option("--jobs", jobs, "Worker threads (falls back to INNERVAR_JOBS)")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed for randomized suites, overriding the config");

  auto* list = app.add_subcommand("list-experiments", "List built-in experiment configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list->parsed()) {
    for (std::size_t i = 0; i < innervar_builtin_count(); ++i)
      std::cout << innervar_builtin_name(i) << "\t" << innervar_builtin_description(i) << '\n';
    return kExitPass;
  }

  innervar_run_options opts{};
  if (seed) {
    opts.has_seed = 1;
    opts.seed = *seed;
  }
  if (jobs) {
    opts.jobs = *jobs;
  } else if (const char* env = std::getenv("INNERVAR_JOBS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
      std::cerr << "error: INNERVAR_JOBS must be a positive integer\n";
      return kExitConfig;
    }
    opts.jobs = static_cast<int>(n);
  }

  if (target != "all") return run_one(target, out_dir, opts);
  const std::filesystem::path root = out_dir.empty() ? std::filesystem::path("results") : std::filesystem::path(out_dir);
  int worst = kExitPass;
  for (std::size_t i = 0; i < innervar_builtin_count(); ++i) {
    const std::string name = innervar_builtin_name(i);
    const int code = run_one(name, root / name, opts);
    if (code == kExitConfig) return kExitConfig;
    worst = std::max(worst, code);
  }
  return worst;
}
