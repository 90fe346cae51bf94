#pragma once

// Subcommand drivers shared by the rcmsim tool and the test suites. Each
// writes <command>.csv and <command>_manifest.json into cfg.output_dir.

#include <filesystem>
#include <map>
#include <ostream>
#include <string>

#include "rcm/config.hpp"
#include "rcm/mc.hpp"

namespace rcm {

/// Column order of every curve CSV.
inline constexpr const char* kCurveCsvHeader = "detector,sinr_db,value,stderr,n_trials,seed";
inline constexpr const char* kCalibrationCsvHeader =
    "detector,threshold,target_pfa,n_trials,pfa_ci_low,pfa_ci_high,seed";
inline constexpr const char* kBenchmarkCsvHeader = "detector,mean_us,variance_us2,n_trials,seed";

std::vector<CalibrationResult> cmd_calibrate(const RunConfig& cfg, int workers, std::ostream& log);

/// Thresholds from a calibrate manifest.
std::map<DetectorKind, double> load_thresholds(const std::filesystem::path& manifest);

std::map<DetectorKind, std::vector<CurvePoint>> cmd_pd_curve(
    const RunConfig& cfg, const std::map<DetectorKind, double>& thresholds, int workers,
    std::ostream& log);

std::map<SelectionRule, std::vector<CurvePoint>> cmd_mvmp_curve(const RunConfig& cfg, int workers,
                                                                std::ostream& log);

std::vector<TimingRow> cmd_benchmark(const RunConfig& cfg, std::ostream& log);

/// Reads a whole file.
std::string read_file(const std::filesystem::path& path);

}  // namespace rcm
