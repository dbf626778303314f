#include "innervar/innervar.h"

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "innervar/catalog.hpp"
#include "innervar/errors.hpp"
#include "innervar/profiles.hpp"
#include "innervar/runner.hpp"

struct innervar_result {
  innervar::RunResult run;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

struct BuiltinStrings {
  std::vector<std::string> names, descriptions, texts;
};

const BuiltinStrings& builtins() {
  static const BuiltinStrings b = [] {
    BuiltinStrings s;
    for (const auto& e : innervar::builtin_configs()) {
      s.names.emplace_back(e.name);
      s.descriptions.push_back(innervar::builtin_description(e));
      s.texts.emplace_back(e.text);
    }
    return s;
  }();
  return b;
}

int fail(int status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const innervar::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(INNERVAR_INTERNAL, e.what());
  } catch (...) {
    return fail(INNERVAR_INTERNAL, "unknown failure");
  }
}

innervar::RunOptions to_options(const innervar_run_options* o) {
  innervar::RunOptions r;
  if (!o) return r;
  if (o->has_seed) r.seed = o->seed;
  r.jobs = o->jobs;
  return r;
}

int finish(innervar::RunResult run, innervar_result** out) {
  auto r = std::make_unique<innervar_result>();
  r->summary = run.summary().dump(2);
  r->run = std::move(run);
  *out = r.release();
  return INNERVAR_OK;
}

}  // namespace

extern "C" {

const char* innervar_version(void) { return "1.0.0"; }

const char* innervar_status_name(int status) {
  switch (status) {
    case INNERVAR_OK: return "Ok";
    case INNERVAR_INVALID_ARGUMENT: return "InvalidArgument";
    case INNERVAR_INTERNAL: return "Internal";
    default:
      if (status >= INNERVAR_NON_INVERTIBLE && status <= INNERVAR_NUMERICAL_FAILURE)
        return innervar::error_code_name(static_cast<innervar::ErrorCode>(status));
      return "Unknown";
  }
}

const char* innervar_last_error(void) { return g_last_error.c_str(); }

int innervar_c_p(double p, double* out) {
  if (!out) return fail(INNERVAR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    *out = innervar::c_p(p);
    return INNERVAR_OK;
  });
}

int innervar_profile_eval(double p, double s, double out[4]) {
  if (!out) return fail(INNERVAR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const innervar::ProfileTable t(p);
    const auto v = t.eval(s);
    out[0] = v.q;
    out[1] = v.d1;
    out[2] = v.d2;
    out[3] = v.d3;
    return INNERVAR_OK;
  });
}

int innervar_run_text(const char* json_text, const char* name, const innervar_run_options* options,
                      innervar_result** out) {
  if (!json_text || !out) return fail(INNERVAR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return finish(innervar::run_config_text(json_text, name ? name : "", to_options(options)), out); });
}

int innervar_run_file(const char* path, const innervar_run_options* options, innervar_result** out) {
  if (!path || !out) return fail(INNERVAR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  std::ifstream is(path, std::ios::binary);
  if (!is) return fail(INNERVAR_CONFIG_ERROR, std::string("ConfigError: cannot read ") + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string stem = std::filesystem::path(path).stem().string();
  return guarded([&] { return finish(innervar::run_config_text(ss.str(), stem, to_options(options)), out); });
}

int innervar_run_builtin(const char* name, const innervar_run_options* options, innervar_result** out) {
  if (!name || !out) return fail(INNERVAR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  const innervar::CatalogEntry* e = innervar::find_builtin(name);
  if (!e) return fail(INNERVAR_CONFIG_ERROR, std::string("ConfigError: no built-in experiment named ") + name);
  return guarded(
      [&] { return finish(innervar::run_config_text(std::string(e->text), std::string(e->name), to_options(options)), out); });
}

int innervar_result_pass(const innervar_result* r) { return r && r->run.pass ? 1 : 0; }

const char* innervar_result_name(const innervar_result* r) { return r ? r->run.name.c_str() : nullptr; }

const char* innervar_result_summary(const innervar_result* r) { return r ? r->summary.c_str() : nullptr; }

size_t innervar_result_case_count(const innervar_result* r) { return r ? r->run.cases.size() : 0; }

const char* innervar_result_case_name(const innervar_result* r, size_t i) {
  return r && i < r->run.cases.size() ? r->run.cases[i].name.c_str() : nullptr;
}

const char* innervar_result_case_csv(const innervar_result* r, size_t i) {
  return r && i < r->run.cases.size() ? r->run.cases[i].csv.c_str() : nullptr;
}

int innervar_result_case_pass(const innervar_result* r, size_t i) {
  return r && i < r->run.cases.size() && r->run.cases[i].pass ? 1 : 0;
}

int innervar_result_write(const innervar_result* r, const char* dir) {
  if (!r || !dir) return fail(INNERVAR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    innervar::write_outputs(r->run, dir);
    return INNERVAR_OK;
  });
}

void innervar_result_free(innervar_result* r) { delete r; }

size_t innervar_builtin_count(void) { return builtins().names.size(); }

const char* innervar_builtin_name(size_t i) {
  return i < builtins().names.size() ? builtins().names[i].c_str() : nullptr;
}

const char* innervar_builtin_description(size_t i) {
  return i < builtins().descriptions.size() ? builtins().descriptions[i].c_str() : nullptr;
}

const char* innervar_builtin_text(size_t i) {
  return i < builtins().texts.size() ? builtins().texts[i].c_str() : nullptr;
}

}  // extern "C"
