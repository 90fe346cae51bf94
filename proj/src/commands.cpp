#include "rcm/commands.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace rcm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr SelectionRule kRules[] = {SelectionRule::TwoStep, SelectionRule::OneStep,
                                    SelectionRule::OneStepReduced};

std::string csv_preamble(const RunConfig& cfg) {
  return fmt::format("# config_hash={}\n# seed={}\n", config_hash(cfg), cfg.seed);
}

json manifest(const RunConfig& cfg, std::string_view command) {
  return {{"command", command},
          {"code_version", RCM_VERSION},
          {"config", to_json(cfg)},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg.seed},
          {"model",
           {{"covariance", "exponentially correlated clutter plus white noise"},
            {"sinr", "per-pulse sigma_alpha^2 * v^H M^-1 v"},
            {"amplitudes", "Swerling II, independent CN(0, sigma_alpha^2) per pulse"}}}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_curves(const fs::path& path, const RunConfig& cfg,
                  const std::vector<std::pair<std::string, std::vector<CurvePoint>>>& curves) {
  std::string text = csv_preamble(cfg);
  text += kCurveCsvHeader;
  text += '\n';
  for (const auto& [name, points] : curves) {
    for (const auto& p : points) {
      text += fmt::format("{},{},{},{},{},{}\n", name, p.sinr_db, p.value, p.std_error, p.n_trials,
                          cfg.seed);
    }
  }
  write_text(path, text);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<CalibrationResult> cmd_calibrate(const RunConfig& cfg, int workers, std::ostream& log) {
  const fs::path dir = prepare_dir(cfg);
  const auto results =
      calibrate_all(cfg.detectors, cfg.scenario, cfg.pfa, cfg.trials.calibrate, cfg.seed, workers);

  std::string text = csv_preamble(cfg);
  text += kCalibrationCsvHeader;
  text += '\n';
  json thresholds = json::object();
  for (const auto& r : results) {
    const std::string name(to_string(r.kind));
    text += fmt::format("{},{},{},{},{},{},{}\n", name, r.threshold, r.target_pfa, r.n_trials,
                        r.pfa_ci_low, r.pfa_ci_high, cfg.seed);
    thresholds[name] = r.threshold;
    log << fmt::format("{:>12}  threshold {:.6g}  achieved Pfa 95% CI [{:.3g}, {:.3g}]\n", name,
                       r.threshold, r.pfa_ci_low, r.pfa_ci_high);
  }
  write_text(dir / "calibrate.csv", text);
  json m = manifest(cfg, "calibrate");
  m["thresholds"] = thresholds;
  write_text(dir / "calibrate_manifest.json", m.dump(2) + "\n");
  return results;
}

std::map<DetectorKind, double> load_thresholds(const fs::path& path) {
  json m;
  try {
    m = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("threshold manifest '{}': {}", path.string(), e.what()));
  }
  if (!m.contains("thresholds") || !m["thresholds"].is_object()) {
    throw MissingThreshold(fmt::format("'{}' has no thresholds object", path.string()));
  }
  std::map<DetectorKind, double> out;
  for (const auto& [name, value] : m["thresholds"].items()) {
    out[parse_detector_kind(name)] = value.get<double>();
  }
  return out;
}

std::map<DetectorKind, std::vector<CurvePoint>> cmd_pd_curve(
    const RunConfig& cfg, const std::map<DetectorKind, double>& thresholds, int workers,
    std::ostream& log) {
  if (cfg.sinr_grid.empty()) throw ConfigError("config field 'sinr_grid' must not be empty");
  for (DetectorKind kind : cfg.detectors) {
    if (!thresholds.count(kind)) {
      throw MissingThreshold(
          fmt::format("no threshold for detector '{}'; run calibrate first", to_string(kind)));
    }
  }
  const fs::path dir = prepare_dir(cfg);
  auto curves = pd_curves(cfg.detectors, cfg.scenario, thresholds, cfg.sinr_grid, cfg.trials.pd,
                          cfg.seed, workers);

  std::vector<std::pair<std::string, std::vector<CurvePoint>>> rows;
  json used = json::object();
  for (DetectorKind kind : cfg.detectors) {
    rows.emplace_back(std::string(to_string(kind)), curves.at(kind));
    used[std::string(to_string(kind))] = thresholds.at(kind);
    const auto at_half = crossing_sinr(curves.at(kind), 0.5);
    log << fmt::format("{:>12}  SINR at Pd=0.5: {}\n", to_string(kind),
                       at_half ? fmt::format("{:.2f} dB", *at_half) : std::string("not reached"));
  }
  write_curves(dir / "pd_curve.csv", cfg, rows);
  json m = manifest(cfg, "pd-curve");
  m["thresholds"] = used;
  write_text(dir / "pd_curve_manifest.json", m.dump(2) + "\n");
  return curves;
}

std::map<SelectionRule, std::vector<CurvePoint>> cmd_mvmp_curve(const RunConfig& cfg, int workers,
                                                                std::ostream& log) {
  if (cfg.sinr_grid.empty()) throw ConfigError("config field 'sinr_grid' must not be empty");
  if (!cfg.scenario.true_hypothesis) {
    throw NullHypothesisScenario("mvmp-curve needs scenario.true_hypothesis");
  }
  const fs::path dir = prepare_dir(cfg);
  auto curves = mvmp_curves(kRules, cfg.scenario, cfg.sinr_grid, cfg.trials.mvmp, cfg.seed, workers);

  std::vector<std::pair<std::string, std::vector<CurvePoint>>> rows;
  for (SelectionRule rule : kRules) rows.emplace_back(std::string(to_string(rule)), curves.at(rule));
  write_curves(dir / "mvmp_curve.csv", cfg, rows);

  // Lowest-MVMP rule per SINR point; ties go to the earlier rule.
  json crossover = json::array();
  const auto& two = curves.at(SelectionRule::TwoStep);
  const auto& one = curves.at(SelectionRule::OneStep);
  const auto& red = curves.at(SelectionRule::OneStepReduced);
  for (std::size_t i = 0; i < two.size(); ++i) {
    SelectionRule best = SelectionRule::TwoStep;
    if (one[i].value < curves.at(best)[i].value) best = SelectionRule::OneStep;
    if (red[i].value < curves.at(best)[i].value) best = SelectionRule::OneStepReduced;
    crossover.push_back({{"sinr_db", two[i].sinr_db},
                         {"best", to_string(best)},
                         {"two_step", two[i].value},
                         {"one_step", one[i].value},
                         {"one_step_reduced", red[i].value}});
    log << fmt::format("{:6.1f} dB  MVMP two_step {:.3f}  one_step {:.3f}  reduced {:.3f}  -> best {}\n",
                       two[i].sinr_db, two[i].value, one[i].value, red[i].value, to_string(best));
  }
  json m = manifest(cfg, "mvmp-curve");
  m["crossover"] = crossover;
  write_text(dir / "mvmp_curve_manifest.json", m.dump(2) + "\n");
  return curves;
}

std::vector<TimingRow> cmd_benchmark(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = prepare_dir(cfg);
  const auto rows = benchmark(cfg.detectors, cfg.scenario, cfg.trials.benchmark, cfg.seed);
  std::string text = csv_preamble(cfg);
  text += kBenchmarkCsvHeader;
  text += '\n';
  for (const auto& r : rows) {
    text += fmt::format("{},{},{},{},{}\n", to_string(r.kind), r.mean_us, r.variance_us2,
                        r.n_trials, cfg.seed);
    log << fmt::format("{:>12}  {:10.2f} us/trial  (sd {:.2f})\n", to_string(r.kind), r.mean_us,
                       std::sqrt(r.variance_us2));
  }
  write_text(dir / "benchmark.csv", text);
  write_text(dir / "benchmark_manifest.json", manifest(cfg, "benchmark").dump(2) + "\n");
  return rows;
}

}  // namespace rcm
