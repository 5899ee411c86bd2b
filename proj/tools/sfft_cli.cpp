// Command line front end: run / sweep through the C API, selftest through the acceptance checks.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "checks.hpp"
#include "sfft/sfft.h"

namespace {

int report(sfft_status st) {
  if (st == SFFT_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", sfft_status_name(st), sfft_last_error());
  return 2;
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int load(const std::string& path, const std::vector<std::string>& sets, sfft_experiment** exp) {
  if (int rc = report(sfft_experiment_from_file(path.c_str(), exp))) return rc;
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects name=value, got '%s'\n", kv.c_str());
      return 2;
    }
    if (int rc = report(sfft_experiment_set(*exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()))) return rc;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse FFT experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sfft_version()));

  std::string spec_path, csv_path, json_path, tidy_path, param, values;
  std::vector<std::string> sets;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run every seed of an experiment spec and write one CSV row per seed");
  run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv_path, "Output CSV (stdout when omitted)");
  run->add_option("--json", json_path, "JSON sidecar with the full configuration");
  run->add_option("--set", sets, "Override a spec field, name=value (repeatable)");
  run->add_option("--threads", threads, "Worker threads (default: SFFT_THREADS or all cores)");

  auto* sweep = app.add_subcommand("sweep", "Sweep one spec parameter and write long-format plot data");
  sweep->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "Parameter name, e.g. k or constants.alpha")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", tidy_path, "Output CSV (stdout when omitted)");
  sweep->add_option("--set", sets, "Override a spec field, name=value (repeatable)");
  sweep->add_option("--threads", threads, "Worker threads (default: SFFT_THREADS or all cores)");

  std::vector<int> ids;
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks; exit 0 iff all pass");
  selftest->add_option("--only", ids, "Run only these check numbers");

  CLI11_PARSE(app, argc, argv);

  if (*run || *sweep) {
    sfft_experiment* exp = nullptr;
    int rc = load(spec_path, sets, &exp);
    if (rc == 0) {
      rc = *run ? report(sfft_experiment_run(exp, threads, or_null(csv_path), or_null(json_path)))
                : report(sfft_experiment_sweep(exp, param.c_str(), values.c_str(), threads, or_null(tidy_path)));
    }
    sfft_experiment_destroy(exp);
    return rc;
  }

  int failed = 0;
  sfft::acceptance::run_checks(ids, [&](const sfft::acceptance::CheckResult& r) {
    std::printf("%s\n", sfft::acceptance::format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  });
  return failed == 0 ? 0 : 1;
}
