#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rcm/detect.hpp"
#include "rcm/scene.hpp"

namespace rcm {

struct TrialCounts {
  std::int64_t calibrate = 100000;
  std::int64_t pd = 5000;
  std::int64_t mvmp = 2000;
  std::int64_t benchmark = 200;

  friend bool operator==(const TrialCounts&, const TrialCounts&) = default;
};

struct RunConfig {
  Scenario scenario;
  std::vector<DetectorKind> detectors{kAllDetectors.begin(), kAllDetectors.end()};
  double pfa = 1e-3;
  std::vector<double> sinr_grid;
  TrialCounts trials;
  std::uint64_t seed = 20201;
  std::string output_dir = "results";

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Defaults of the reference experiment: N_a = 8, N_p = 16, K = 12,
/// Pfa = 1e-3, v_t = 30 m/s, PRT = 1 ms, 0.3 m cells, SINR 0..30 dB in 2 dB steps.
RunConfig default_run_config();

nlohmann::json to_json(const Scenario& scn);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Parses and validates config text. Syntax errors report line and column.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);

/// FNV-1a 64 of the canonical serialization without output_dir, as 16 hex
/// digits. Identifies the experiment, not where its artifacts are written.
std::string config_hash(const RunConfig& cfg);

}  // namespace rcm
