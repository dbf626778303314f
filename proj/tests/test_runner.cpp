#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "innervar/catalog.hpp"
#include "innervar/errors.hpp"
#include "innervar/runner.hpp"

using namespace innervar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    run_config_text(text, "t");
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NumericalFailure;
}

const char* kTangentReference = R"({
  "kind": "volume",
  "cases": [{
    "name": "tangent",
    "check": "perturbation",
    "geometry": {"type": "sphere", "center": [0, 0, 0], "radius": 1, "n_theta": 8, "n_phi": 16},
    "eta": {"type": "normal-extension", "xi": {"type": "coordinate", "index": 2}, "width": 0.5},
    "phi": {"type": "rotation3d", "omega": [0, 0, 1]},
    "region_radius": 1.8,
    "schedule": {"eps0": 0.04, "points": 2},
    "ansatz": {"blend_width": 0.4}
  }]
})";

const char* kGoodIdentity = R"({
  "kind": "identities",
  "seed": 11,
  "cases": [{"name": "good", "check": "good-identity", "count": 2, "points": 40}]
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("innervar-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + INNERVAR_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("schema errors are config errors") {
  CHECK(code_of("{") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a", "p": [2]}], "colour": 1})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a", "p": [2], "q": 1}]})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "nope", "cases": [{"name": "a"}]})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a b", "p": [2]}]})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a", "p": [2]}, {"name": "a", "p": [3]}]})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a", "p": [2], "tolerances": {"gamma_x": 1}}]})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"kind": "profile", "cases": [{"name": "a", "p": [0.5]}]})") == ErrorCode::ConfigError);
}

TEST_CASE("an eps schedule wider than the blend band is rejected") {
  const char* text = R"({
    "kind": "ac-converge",
    "cases": [{
      "name": "wide",
      "geometry": {"type": "flat", "dim": 2, "normal_axis": 0, "lo": [0, -1], "hi": [0, 1], "panels": 4, "order": 4},
      "p": 2,
      "eta": {"type": "zero", "components": 2},
      "schedule": {"eps0": 1.0, "points": 4},
      "ansatz": {"blend_width": 0.9}
    }]
  })";
  CHECK(code_of(text) == ErrorCode::ConfigError);
}

TEST_CASE("profile config passes and writes outputs") {
  const RunResult r = run_config_text(R"({"kind": "profile", "cases": [{"name": "c", "p": [1, 2, 3]}]})", "prof");
  CHECK(r.name == "prof");
  REQUIRE(r.cases.size() == 1);
  CHECK(r.pass);
  const fs::path dir = scratch("profile");
  write_outputs(r, dir);
  CHECK(fs::exists(dir / "c.csv"));
  std::ifstream is(dir / "summary.json");
  const json s = json::parse(is);
  CHECK(s.at("format_version") == kSummaryFormatVersion);
  CHECK(s.at("pass") == true);
}

TEST_CASE("a tangent reference field fails its case with the error named") {
  const RunResult r = run_config_text(kTangentReference, "t");
  REQUIRE(r.cases.size() == 1);
  CHECK_FALSE(r.pass);
  CHECK(r.cases[0].error.find("DegenerateReference") != std::string::npos);

  json expect = json::parse(kTangentReference);
  expect["cases"][0]["expect_error"] = "DegenerateReference";
  CHECK(run_config(expect).pass);
  expect["cases"][0]["expect_error"] = "NoSuchError";
  CHECK_THROWS_AS(run_config(expect), Error);
}

TEST_CASE("zero normal speed gives trivial Poincare values") {
  const RunResult r = run_config_text(R"({
    "kind": "poincare",
    "cases": [{"name": "z", "xi": {"type": "zero", "components": 1}, "norm_factor": 0, "width": 0.5,
               "geometry": {"type": "sphere", "center": [0, 0, 0], "radius": 1, "n_theta": 8, "n_phi": 16}}]
  })",
                                      "p");
  CHECK(r.pass);
  const json s = r.summary();
  CHECK(s.at("cases").size() == 1);
  CHECK(r.cases[0].csv.find("\n0,0,0,") != std::string::npos);
}

TEST_CASE("seeds reproduce and override") {
  const RunResult a = run_config_text(kGoodIdentity, "g");
  const RunResult b = run_config_text(kGoodIdentity, "g");
  CHECK(a.pass);
  CHECK(a.seed == 11);
  CHECK(a.cases[0].csv == b.cases[0].csv);
  RunOptions o;
  o.seed = 12;
  const RunResult c = run_config_text(kGoodIdentity, "g", o);
  CHECK(c.seed == 12);
  CHECK(c.cases[0].csv != a.cases[0].csv);
}

TEST_CASE("catalog matches the configs directory") {
  std::set<std::string> on_disk;
  for (const auto& e : fs::directory_iterator(INNERVAR_CONFIG_DIR))
    if (e.path().extension() == ".json") on_disk.insert(e.path().stem().string());
  std::set<std::string> built_in;
  for (const auto& e : builtin_configs()) {
    built_in.insert(std::string(e.name));
    CHECK_FALSE(builtin_description(e).empty());
    std::ifstream is(fs::path(INNERVAR_CONFIG_DIR) / (std::string(e.name) + ".json"));
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == e.text);
  }
  CHECK(built_in == on_disk);
  CHECK(built_in.size() >= 9);
  CHECK(find_builtin("profile") != nullptr);
  CHECK(find_builtin("missing") == nullptr);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("list-experiments") == 0);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("run " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("run profile --out " + (dir / "profile").string()) == 0);
  CHECK(fs::exists(dir / "profile" / "summary.json"));
  CHECK(run_cli("run profile --jobs 0") == 2);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"kind": "profile", "cases": [{"name": "c", "p": [2], "extra": 1}]})";
  CHECK(run_cli("run " + bad.string() + " --out " + (dir / "bad").string()) == 2);

  const fs::path failing = dir / "failing.json";
  std::ofstream(failing) << kTangentReference;
  CHECK(run_cli("run " + failing.string() + " --out " + (dir / "failing").string()) == 1);
  CHECK(fs::exists(dir / "failing" / "summary.json"));
}
