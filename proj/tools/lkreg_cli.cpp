// Command-line front end; talks to the library only through lkreg.h.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lkreg/lkreg.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2 };

int exit_code(lkreg_status s) {
  switch (s) {
    case LKREG_OK: return kOk;
    case LKREG_ERR_USAGE:
    case LKREG_ERR_IO: return kUsage;
    case LKREG_ERR_NUMERIC:
    case LKREG_ERR_INTERNAL: return kNumeric;
  }
  return kNumeric;
}

int report_failure(lkreg_status s) {
  std::fprintf(stderr, "lkreg: %s: %s\n", lkreg_status_name(s), lkreg_last_error());
  return exit_code(s);
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  std::string report_dir;
};

// Config from file (or defaults) with --set overrides applied in order.
lkreg_status build_config(const Options& opt, lkreg_config** out) {
  lkreg_status s = opt.config_path.empty() ? lkreg_config_create(out)
                                           : lkreg_config_load(opt.config_path.c_str(), out);
  if (s != LKREG_OK) return s;
  for (const auto& o : opt.overrides) {
    s = lkreg_config_override(*out, o.c_str());
    if (s != LKREG_OK) break;
  }
  if (s == LKREG_OK) s = lkreg_config_validate(*out);
  if (s != LKREG_OK) {
    lkreg_config_destroy(*out);
    *out = nullptr;
  }
  return s;
}

void log_cycle(const lkreg_cycle_info* info, void*) {
  if (info->has_error) {
    std::fprintf(stderr, "%s cycle %zu: %zu/%zu active, error %.6g\n", info->method,
                 info->cycle, info->active, info->visited, info->error);
  } else {
    std::fprintf(stderr, "%s cycle %zu: %zu/%zu active\n", info->method, info->cycle,
                 info->active, info->visited);
  }
}

int print_result(lkreg_result* r) {
  std::fputs(lkreg_result_summary_text(r), stdout);
  lkreg_result_destroy(r);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landweber-Kaczmarz reconstructions for TAT and Schlieren data"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", opt.overrides, "override, key=value (repeatable)");
    sub->add_flag("--quiet", opt.quiet, "no per-cycle logging");
  };

  CLI::App* phantom = app.add_subcommand("phantom", "write the phantom");
  CLI::App* simulate = app.add_subcommand("simulate", "write phantom and noisy data");
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "run the configured solver");
  CLI::App* report = app.add_subcommand("report", "recompute the summary from trace.csv");
  for (CLI::App* sub : {phantom, simulate, reconstruct, report}) add_common(sub);
  report->add_option("dir", opt.report_dir, "run directory (default: output_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  lkreg_config* cfg = nullptr;
  lkreg_status s = build_config(opt, &cfg);
  if (s != LKREG_OK) return report_failure(s);

  lkreg_result* result = nullptr;
  if (*phantom) {
    s = lkreg_write_phantom(cfg);
  } else if (*simulate) {
    s = lkreg_simulate(cfg);
  } else if (*reconstruct) {
    s = lkreg_run_experiment(cfg, opt.quiet ? nullptr : log_cycle, nullptr, &result);
  } else {
    std::string dir = opt.report_dir;
    if (dir.empty()) {
      size_t needed = 0;
      s = lkreg_config_get(cfg, "output_dir", nullptr, 0, &needed);
      if (s == LKREG_OK) {
        std::vector<char> buf(needed);
        s = lkreg_config_get(cfg, "output_dir", buf.data(), buf.size(), &needed);
        dir = buf.data();
      }
    }
    if (s == LKREG_OK) s = lkreg_report(dir.c_str(), &result);
  }
  lkreg_config_destroy(cfg);
  if (s != LKREG_OK) return report_failure(s);
  if (result) return print_result(result);
  return kOk;
}
