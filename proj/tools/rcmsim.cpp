// rcmsim: Monte-Carlo driver for the migration-aware detectors.
//
//   rcmsim calibrate  --config run.json [--seed N] [--workers N] [--out DIR]
//   rcmsim pd-curve   --config run.json [--thresholds DIR/calibrate_manifest.json] ...
//   rcmsim mvmp-curve --config run.json ...
//   rcmsim benchmark  --config run.json ...
//   rcmsim selftest   [--instances N] [--inject-penalty-fault]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "rcm/commands.hpp"
#include "rcm/selftest.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "Master seed; overrides the config");
  cmd->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "Output directory; overrides the config");
}

rcm::RunConfig resolve(const CommonFlags& flags) {
  rcm::RunConfig cfg = rcm::load_run_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive detection of range-migrating targets: Monte-Carlo simulator"};
  app.require_subcommand(1);

  CommonFlags calibrate_flags, pd_flags, mvmp_flags, bench_flags;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate detector thresholds at the target Pfa");
  add_common(calibrate, calibrate_flags);

  std::optional<std::string> thresholds_path;
  auto* pd = app.add_subcommand("pd-curve", "Probability of detection versus SINR");
  add_common(pd, pd_flags);
  pd->add_option("--thresholds", thresholds_path,
                 "Calibrate manifest (default: <out>/calibrate_manifest.json)");

  auto* mvmp = app.add_subcommand("mvmp-curve", "Mean misclassified pulses versus SINR");
  add_common(mvmp, mvmp_flags);

  auto* bench = app.add_subcommand("benchmark", "Per-detector wall time per trial");
  add_common(bench, bench_flags);

  rcm::SelftestOptions selftest_options;
  bool inject_fault = false;
  auto* selftest = app.add_subcommand("selftest", "Oracle equivalence and invariance checks");
  selftest->add_option("--instances", selftest_options.instances, "Random instances")
      ->check(CLI::PositiveNumber);
  selftest->add_flag("--inject-penalty-fault", inject_fault,
                     "Perturb the BIC penalties (negative control; must fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (calibrate->parsed()) {
      rcm::cmd_calibrate(resolve(calibrate_flags), calibrate_flags.workers, std::cout);
    } else if (pd->parsed()) {
      const auto cfg = resolve(pd_flags);
      const auto path = thresholds_path
                            ? std::filesystem::path(*thresholds_path)
                            : std::filesystem::path(cfg.output_dir) / "calibrate_manifest.json";
      if (!std::filesystem::exists(path)) {
        throw rcm::MissingThreshold("threshold manifest '" + path.string() +
                                    "' not found; run calibrate first");
      }
      rcm::cmd_pd_curve(cfg, rcm::load_thresholds(path), pd_flags.workers, std::cout);
    } else if (mvmp->parsed()) {
      rcm::cmd_mvmp_curve(resolve(mvmp_flags), mvmp_flags.workers, std::cout);
    } else if (bench->parsed()) {
      rcm::cmd_benchmark(resolve(bench_flags), std::cout);
    } else if (selftest->parsed()) {
      if (inject_fault) selftest_options.penalty_fault = 1.05;
      const bool ok = rcm::print_selftest(rcm::run_selftest(selftest_options), std::cout);
      std::cout << (ok ? "selftest passed\n" : "selftest FAILED\n");
      return ok ? 0 : 1;
    }
  } catch (const rcm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
