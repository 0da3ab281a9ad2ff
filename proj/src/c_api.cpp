#include "lkreg/lkreg.h"

#include <cstring>
#include <exception>
#include <functional>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lkreg/experiment.hpp"

struct lkreg_config {
  lkreg::ExperimentConfig value;
};

struct lkreg_result {
  lkreg::RunSummary summary;
  std::string summary_text;
  std::size_t side = 0;
  std::vector<double> solution;
};

namespace {

thread_local std::string g_last_error;

lkreg_status fail(lkreg_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <class F>
lkreg_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LKREG_OK;
  } catch (const lkreg::UsageError& e) {
    return fail(LKREG_ERR_USAGE, e.what());
  } catch (const lkreg::NumericalError& e) {
    return fail(LKREG_ERR_NUMERIC, e.what());
  } catch (const lkreg::IoError& e) {
    return fail(LKREG_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LKREG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LKREG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LKREG_ERR_INTERNAL, "unknown error");
  }
}

lkreg_status null_arg(const char* what) {
  return fail(LKREG_ERR_USAGE, (std::string(what) + " is null").c_str());
}

void copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf || cap == 0) return;
  if (cap <= text.size()) throw lkreg::UsageError("buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

lkreg_result* make_result(const lkreg::RunSummary& summary) {
  auto* r = new lkreg_result;
  r->summary = summary;
  std::ostringstream text;
  lkreg::write_summary(text, summary);
  r->summary_text = text.str();
  return r;
}

}  // namespace

extern "C" {

const char* lkreg_last_error(void) { return g_last_error.c_str(); }

const char* lkreg_status_name(lkreg_status status) {
  switch (status) {
    case LKREG_OK: return "ok";
    case LKREG_ERR_USAGE: return "usage error";
    case LKREG_ERR_NUMERIC: return "numerical error";
    case LKREG_ERR_IO: return "i/o error";
    case LKREG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

lkreg_status lkreg_config_create(lkreg_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new lkreg_config; });
}

lkreg_status lkreg_config_load(const char* path, lkreg_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new lkreg_config{lkreg::ExperimentConfig::load(path)}; });
}

void lkreg_config_destroy(lkreg_config* config) { delete config; }

lkreg_status lkreg_config_set(lkreg_config* config, const char* key, const char* value) {
  if (!config) return null_arg("config");
  if (!key || !value) return null_arg("key/value");
  return guarded([&] { config->value.set(key, value); });
}

lkreg_status lkreg_config_override(lkreg_config* config, const char* assignment) {
  if (!config) return null_arg("config");
  if (!assignment) return null_arg("assignment");
  return guarded([&] { config->value.apply_override(assignment); });
}

lkreg_status lkreg_config_validate(const lkreg_config* config) {
  if (!config) return null_arg("config");
  return guarded([&] { config->value.validate(); });
}

lkreg_status lkreg_config_text(const lkreg_config* config, char* buf, size_t cap,
                               size_t* needed) {
  if (!config) return null_arg("config");
  return guarded([&] {
    std::ostringstream out;
    config->value.write(out);
    copy_out(out.str(), buf, cap, needed);
  });
}

lkreg_status lkreg_config_get(const lkreg_config* config, const char* key, char* buf,
                              size_t cap, size_t* needed) {
  if (!config) return null_arg("config");
  if (!key) return null_arg("key");
  return guarded([&] {
    std::ostringstream out;
    config->value.write(out);
    std::istringstream in(out.str());
    const std::string prefix = std::string(key) + " = ";
    for (std::string line; std::getline(in, line);) {
      if (line.rfind(prefix, 0) == 0) {
        copy_out(line.substr(prefix.size()), buf, cap, needed);
        return;
      }
    }
    throw lkreg::UsageError("unknown config key '" + std::string(key) + "'");
  });
}

lkreg_status lkreg_write_phantom(const lkreg_config* config) {
  if (!config) return null_arg("config");
  return guarded([&] { lkreg::write_phantom_outputs(config->value); });
}

lkreg_status lkreg_simulate(const lkreg_config* config) {
  if (!config) return null_arg("config");
  return guarded([&] { lkreg::write_simulation_outputs(config->value); });
}

lkreg_status lkreg_run_experiment(const lkreg_config* config, lkreg_cycle_fn on_cycle,
                                  void* user, lkreg_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::function<void(const lkreg::CycleReport&)> hook;
    if (on_cycle) {
      hook = [on_cycle, user](const lkreg::CycleReport& r) {
        const std::string_view name = lkreg::method_name(r.method);
        lkreg_cycle_info info{name.data(), r.cycle, r.active, r.visited,
                              r.error ? 1 : 0, r.error.value_or(0.0)};
        on_cycle(&info, user);
      };
    }
    lkreg::ExperimentResult res = lkreg::run_experiment(config->value, std::move(hook));
    lkreg_result* r = make_result(res.summary);
    r->side = res.solve.solution.grid().side();
    const auto v = res.solve.solution.values();
    r->solution.assign(v.begin(), v.end());
    *out = r;
  });
}

lkreg_status lkreg_report(const char* dir, lkreg_result** out) {
  if (!dir) return null_arg("dir");
  if (!out) return null_arg("out");
  return guarded([&] { *out = make_result(lkreg::report_from_directory(dir)); });
}

void lkreg_result_destroy(lkreg_result* result) { delete result; }

size_t lkreg_result_cycles(const lkreg_result* r) { return r ? r->summary.cycles : 0; }
int lkreg_result_converged(const lkreg_result* r) { return r && r->summary.converged ? 1 : 0; }
size_t lkreg_result_active_steps(const lkreg_result* r) {
  return r ? r->summary.active_steps : 0;
}
size_t lkreg_result_visited_steps(const lkreg_result* r) {
  return r ? r->summary.visited_steps : 0;
}
double lkreg_result_loped_fraction(const lkreg_result* r) {
  return r ? r->summary.loped_fraction() : 0.0;
}

int lkreg_result_final_error(const lkreg_result* r, double* out) {
  if (!r || !r->summary.final_error) return 0;
  if (out) *out = *r->summary.final_error;
  return 1;
}

const char* lkreg_result_summary_text(const lkreg_result* r) {
  return r ? r->summary_text.c_str() : "";
}

size_t lkreg_result_grid_side(const lkreg_result* r) { return r ? r->side : 0; }

lkreg_status lkreg_result_solution(const lkreg_result* r, double* buf, size_t count) {
  if (!r) return null_arg("result");
  if (!buf) return null_arg("buf");
  if (r->solution.empty()) return fail(LKREG_ERR_USAGE, "result carries no solution");
  if (count != r->solution.size()) return fail(LKREG_ERR_USAGE, "count must equal M*M");
  std::memcpy(buf, r->solution.data(), count * sizeof(double));
  return LKREG_OK;
}

}  // extern "C"
