#pragma once

// Deterministic trial-parallel Monte-Carlo engine. Trial t of a phase always
// draws from RngStream(mix_seed(seed, phase), t); trials are split into
// contiguous blocks per worker and results are reduced in trial order, so the
// output does not depend on the worker count.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rcm/detect.hpp"
#include "rcm/scene.hpp"
#include "rcm/select.hpp"

namespace rcm {

/// Seed-derivation tags; one per experiment phase.
enum class Phase : std::uint64_t { Calibrate = 1, PdCurve = 2, MvmpCurve = 3, Benchmark = 4 };

struct CalibrationResult {
  DetectorKind kind = DetectorKind::GAMF;
  double threshold = 0;
  double target_pfa = 0;
  std::int64_t n_trials = 0;
  double pfa_ci_low = 0;
  double pfa_ci_high = 0;
};

struct CurvePoint {
  double sinr_db = 0;
  double value = 0;
  double std_error = 0;
  std::int64_t n_trials = 0;
};

struct TimingRow {
  DetectorKind kind = DetectorKind::GAMF;
  double mean_us = 0;
  double variance_us2 = 0;
  std::int64_t n_trials = 0;
};

/// Runs body(begin, end) over [0, n_trials) in at most `workers` contiguous
/// blocks. Exceptions from workers are rethrown on the caller.
void parallel_trials(std::int64_t n_trials, int workers,
                     const std::function<void(std::int64_t, std::int64_t)>& body);

/// Two-sided 95% Clopper-Pearson interval for `successes` out of `trials`.
std::pair<double, double> binomial_interval(std::int64_t successes, std::int64_t trials,
                                            double confidence = 0.95);

/// Central 95% range of a Binomial(n, p) count, as rates [lo/n, hi/n].
std::pair<double, double> binomial_acceptance_region(std::int64_t n, double p,
                                                     double confidence = 0.95);

/// Clairvoyant inputs implied by a scenario: its true hypothesis and covariance.
std::optional<ClairvoyantInputs> clairvoyant_inputs(const Scenario& scn);

/// H_0 statistics for each detector, indexed [detector][trial]. The data are
/// always signal-free; the clairvoyant uses the scenario's true hypothesis.
std::vector<std::vector<double>> null_statistics(std::span<const DetectorKind> kinds,
                                                 const Scenario& scn, std::int64_t n_trials,
                                                 std::uint64_t seed, int workers = 1);

/// Threshold = the ceil(n_trials * target_pfa)-th largest H_0 statistic.
/// Requires n_trials * target_pfa >= 10.
std::vector<CalibrationResult> calibrate_all(std::span<const DetectorKind> kinds,
                                             const Scenario& scn, double target_pfa,
                                             std::int64_t n_trials, std::uint64_t seed,
                                             int workers = 1);

CalibrationResult calibrate(DetectorKind kind, const Scenario& scn, double target_pfa,
                            std::int64_t n_trials, std::uint64_t seed, int workers = 1);

/// Fraction of H_0 trials whose statistic exceeds the threshold, per detector.
std::vector<double> empirical_pfa(std::span<const DetectorKind> kinds,
                                  std::span<const double> thresholds, const Scenario& scn,
                                  std::int64_t n_trials, std::uint64_t seed, int workers = 1);

/// Pd(SINR) for several detectors with common random numbers: every detector
/// and every SINR point sees the same noise for a given trial index.
std::map<DetectorKind, std::vector<CurvePoint>> pd_curves(
    std::span<const DetectorKind> kinds, const Scenario& scn,
    const std::map<DetectorKind, double>& thresholds, std::span<const double> sinr_grid,
    std::int64_t n_trials, std::uint64_t seed, int workers = 1);

std::vector<CurvePoint> pd_curve(DetectorKind kind, const Scenario& scn, double threshold,
                                 std::span<const double> sinr_grid, std::int64_t n_trials,
                                 std::uint64_t seed, int workers = 1);

/// |{1..l} ^ {1..l'}| + |{l+1..l+h} ^ {l'+1..l'+h'}| (symmetric differences).
int misclassified_pulses(HypothesisIndex truth, HypothesisIndex estimate);

std::map<SelectionRule, std::vector<CurvePoint>> mvmp_curves(
    std::span<const SelectionRule> rules, const Scenario& scn, std::span<const double> sinr_grid,
    std::int64_t n_trials, std::uint64_t seed, int workers = 1);

std::vector<CurvePoint> mvmp_curve(SelectionRule rule, const Scenario& scn,
                                   std::span<const double> sinr_grid, std::int64_t n_trials,
                                   std::uint64_t seed, int workers = 1);

/// Mean and variance of single-trial detect() wall time, data generation
/// excluded. Sequential on the calling thread.
std::vector<TimingRow> benchmark(std::span<const DetectorKind> kinds, const Scenario& scn,
                                 std::int64_t n_trials, std::uint64_t seed);

/// SINR at which a curve first reaches `level`, linearly interpolated in dB
/// between grid points; nullopt when it never does.
std::optional<double> crossing_sinr(const std::vector<CurvePoint>& curve, double level);

}  // namespace rcm
