#include "rcm/mc.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace rcm {

void parallel_trials(std::int64_t n_trials, int workers,
                     const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (n_trials <= 0) return;
  const std::int64_t blocks = std::clamp<std::int64_t>(workers, 1, n_trials);
  if (blocks == 1) {
    body(0, n_trials);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(blocks));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(blocks));
    for (std::int64_t b = 0; b < blocks; ++b) {
      const std::int64_t begin = n_trials * b / blocks;
      const std::int64_t end = n_trials * (b + 1) / blocks;
      pool.emplace_back([&, b, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(b)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<double, double> binomial_interval(std::int64_t successes, std::int64_t trials,
                                            double confidence) {
  using boost::math::binomial_distribution;
  const double alpha = (1.0 - confidence) / 2.0;
  const auto n = static_cast<double>(trials);
  const auto k = static_cast<double>(successes);
  return {binomial_distribution<>::find_lower_bound_on_p(n, k, alpha),
          binomial_distribution<>::find_upper_bound_on_p(n, k, alpha)};
}

std::pair<double, double> binomial_acceptance_region(std::int64_t n, double p,
                                                     double confidence) {
  const boost::math::binomial_distribution<> dist(static_cast<double>(n), p);
  const double alpha = (1.0 - confidence) / 2.0;
  const auto nd = static_cast<double>(n);
  return {quantile(dist, alpha) / nd, quantile(complement(dist, alpha)) / nd};
}

std::optional<ClairvoyantInputs> clairvoyant_inputs(const Scenario& scn) {
  if (!scn.true_hypothesis) return std::nullopt;
  return ClairvoyantInputs{*scn.true_hypothesis,
                           make_covariance(scn.covariance_params, scn.n_antennas)};
}

namespace {

bool wants_clairvoyant(std::span<const DetectorKind> kinds) {
  return std::find(kinds.begin(), kinds.end(), DetectorKind::CLAIRVOYANT) != kinds.end();
}

DetectorBank make_bank(std::span<const DetectorKind> kinds, const Scenario& scn,
                       const ComplexVector& v) {
  std::optional<ClairvoyantInputs> clairvoyant;
  if (wants_clairvoyant(kinds)) {
    clairvoyant = clairvoyant_inputs(scn);
    if (!clairvoyant) {
      throw MissingClairvoyantInputs(
          "clairvoyant detector requested but the scenario has no true hypothesis");
    }
  }
  return DetectorBank(std::vector<DetectorKind>(kinds.begin(), kinds.end()), v, clairvoyant);
}

std::int64_t order_statistic_rank(std::int64_t n_trials, double target_pfa) {
  const double expected = static_cast<double>(n_trials) * target_pfa;
  const double nearest = std::round(expected);
  if (std::abs(expected - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::ceil(expected));
}

}  // namespace

std::vector<std::vector<double>> null_statistics(std::span<const DetectorKind> kinds,
                                                 const Scenario& scn, std::int64_t n_trials,
                                                 std::uint64_t seed, int workers) {
  const SceneGenerator generator(scn, /*with_signal=*/false);
  const DetectorBank bank = make_bank(kinds, scn, generator.steering());
  const std::uint64_t phase_seed = mix_seed(seed, static_cast<std::uint64_t>(Phase::Calibrate));
  std::vector<std::vector<double>> stats(kinds.size(),
                                         std::vector<double>(static_cast<std::size_t>(n_trials)));
  parallel_trials(n_trials, workers, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      RngStream rng(phase_seed, static_cast<std::uint64_t>(t));
      const auto reports = bank.evaluate(generator(rng));
      for (std::size_t d = 0; d < reports.size(); ++d) {
        stats[d][static_cast<std::size_t>(t)] = reports[d].statistic;
      }
    }
  });
  return stats;
}

std::vector<CalibrationResult> calibrate_all(std::span<const DetectorKind> kinds,
                                             const Scenario& scn, double target_pfa,
                                             std::int64_t n_trials, std::uint64_t seed,
                                             int workers) {
  if (!(target_pfa > 0 && target_pfa < 1)) {
    throw InsufficientTrials("calibrate: target Pfa must lie in (0, 1)");
  }
  if (static_cast<double>(n_trials) * target_pfa < 10.0 - 1e-9) {
    throw InsufficientTrials("calibrate: n_trials * target_pfa must be at least 10");
  }
  const std::int64_t rank = order_statistic_rank(n_trials, target_pfa);
  auto stats = null_statistics(kinds, scn, n_trials, seed, workers);

  std::vector<CalibrationResult> out;
  out.reserve(kinds.size());
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    auto& s = stats[d];
    std::nth_element(s.begin(), s.begin() + (rank - 1), s.end(), std::greater<>());
    const double threshold = s[static_cast<std::size_t>(rank - 1)];
    const auto exceed = std::count_if(s.begin(), s.end(), [&](double x) { return x > threshold; });
    const auto [lo, hi] = binomial_interval(exceed, n_trials);
    out.push_back({kinds[d], threshold, target_pfa, n_trials, lo, hi});
  }
  return out;
}

CalibrationResult calibrate(DetectorKind kind, const Scenario& scn, double target_pfa,
                            std::int64_t n_trials, std::uint64_t seed, int workers) {
  const DetectorKind kinds[] = {kind};
  return calibrate_all(kinds, scn, target_pfa, n_trials, seed, workers).front();
}

std::vector<double> empirical_pfa(std::span<const DetectorKind> kinds,
                                  std::span<const double> thresholds, const Scenario& scn,
                                  std::int64_t n_trials, std::uint64_t seed, int workers) {
  if (thresholds.size() != kinds.size()) {
    throw DimensionMismatch("empirical_pfa: one threshold per detector required");
  }
  const auto stats = null_statistics(kinds, scn, n_trials, seed, workers);
  std::vector<double> pfa;
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    const auto exceed = std::count_if(stats[d].begin(), stats[d].end(),
                                      [&](double x) { return x > thresholds[d]; });
    pfa.push_back(static_cast<double>(exceed) / static_cast<double>(n_trials));
  }
  return pfa;
}

std::map<DetectorKind, std::vector<CurvePoint>> pd_curves(
    std::span<const DetectorKind> kinds, const Scenario& scn,
    const std::map<DetectorKind, double>& thresholds, std::span<const double> sinr_grid,
    std::int64_t n_trials, std::uint64_t seed, int workers) {
  std::vector<double> eta;
  for (DetectorKind kind : kinds) {
    const auto it = thresholds.find(kind);
    if (it == thresholds.end()) {
      throw MissingThreshold("no threshold for detector '" + std::string(to_string(kind)) + "'");
    }
    eta.push_back(it->second);
  }
  const std::uint64_t phase_seed = mix_seed(seed, static_cast<std::uint64_t>(Phase::PdCurve));
  std::map<DetectorKind, std::vector<CurvePoint>> curves;

  for (double sinr : sinr_grid) {
    Scenario point = scn;
    point.sinr_db = sinr;
    const SceneGenerator generator(point);
    const DetectorBank bank = make_bank(kinds, point, generator.steering());
    // exceed[t * n_kinds + d]
    std::vector<unsigned char> exceed(static_cast<std::size_t>(n_trials) * kinds.size(), 0);
    parallel_trials(n_trials, workers, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t t = begin; t < end; ++t) {
        RngStream rng(phase_seed, static_cast<std::uint64_t>(t));
        const auto reports = bank.evaluate(generator(rng));
        for (std::size_t d = 0; d < reports.size(); ++d) {
          exceed[static_cast<std::size_t>(t) * kinds.size() + d] = reports[d].statistic > eta[d];
        }
      }
    });
    for (std::size_t d = 0; d < kinds.size(); ++d) {
      std::int64_t total = 0;
      for (std::int64_t t = 0; t < n_trials; ++t) {
        total += exceed[static_cast<std::size_t>(t) * kinds.size() + d];
      }
      const double p = static_cast<double>(total) / static_cast<double>(n_trials);
      curves[kinds[d]].push_back(
          {sinr, p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_trials)), n_trials});
    }
  }
  return curves;
}

std::vector<CurvePoint> pd_curve(DetectorKind kind, const Scenario& scn, double threshold,
                                 std::span<const double> sinr_grid, std::int64_t n_trials,
                                 std::uint64_t seed, int workers) {
  const DetectorKind kinds[] = {kind};
  return pd_curves(kinds, scn, {{kind, threshold}}, sinr_grid, n_trials, seed, workers)
      .at(kind);
}

int misclassified_pulses(HypothesisIndex truth, HypothesisIndex estimate) {
  // |{1..a} ^ {1..b}| = |a - b|; for intervals (a, b] and (c, d] the symmetric
  // difference is |A| + |B| - 2 |A n B|.
  const int cell1 = std::abs(truth.l - estimate.l);
  const int a0 = truth.l, a1 = truth.l + truth.h;
  const int b0 = estimate.l, b1 = estimate.l + estimate.h;
  const int overlap = std::max(0, std::min(a1, b1) - std::max(a0, b0));
  const int cell2 = truth.h + estimate.h - 2 * overlap;
  return cell1 + cell2;
}

std::map<SelectionRule, std::vector<CurvePoint>> mvmp_curves(
    std::span<const SelectionRule> rules, const Scenario& scn, std::span<const double> sinr_grid,
    std::int64_t n_trials, std::uint64_t seed, int workers) {
  if (!scn.true_hypothesis) {
    throw NullHypothesisScenario("mvmp curves need a scenario with a true hypothesis");
  }
  const HypothesisIndex truth = *scn.true_hypothesis;
  const std::uint64_t phase_seed = mix_seed(seed, static_cast<std::uint64_t>(Phase::MvmpCurve));
  std::map<SelectionRule, std::vector<CurvePoint>> curves;

  for (double sinr : sinr_grid) {
    Scenario point = scn;
    point.sinr_db = sinr;
    const SceneGenerator generator(point);
    const ComplexVector& v = generator.steering();
    const int na = point.n_antennas;
    // misses[t * n_rules + r]
    std::vector<int> misses(static_cast<std::size_t>(n_trials) * rules.size(), 0);
    parallel_trials(n_trials, workers, [&](std::int64_t begin, std::int64_t end) {
      for (std::int64_t t = begin; t < end; ++t) {
        RngStream rng(phase_seed, static_cast<std::uint64_t>(t));
        const DataSet data = generator(rng);
        std::optional<Factorization<double>> scatter;
        std::optional<ScatterCache> cache;
        for (std::size_t r = 0; r < rules.size(); ++r) {
          HypothesisIndex chosen;
          if (rules[r] != SelectionRule::OneStep && !scatter) {
            scatter = factorize(sample_scatter(data.r));
          }
          if (rules[r] != SelectionRule::TwoStep && !cache) cache.emplace(data);
          switch (rules[r]) {
            case SelectionRule::TwoStep:
              chosen = select_two_step(energy_table(data.z1, data.z2, *scatter, v), na,
                                       data.n_training())
                           .chosen;
              break;
            case SelectionRule::OneStep:
              chosen = select_one_step(*cache, v).chosen;
              break;
            case SelectionRule::OneStepReduced:
              chosen = select_one_step_reduced(*cache, v, *scatter).chosen;
              break;
          }
          misses[static_cast<std::size_t>(t) * rules.size() + r] =
              misclassified_pulses(truth, chosen);
        }
      }
    });
    for (std::size_t r = 0; r < rules.size(); ++r) {
      std::int64_t sum = 0, sum_sq = 0;
      for (std::int64_t t = 0; t < n_trials; ++t) {
        const std::int64_t m = misses[static_cast<std::size_t>(t) * rules.size() + r];
        sum += m;
        sum_sq += m * m;
      }
      const auto n = static_cast<double>(n_trials);
      const double mean = static_cast<double>(sum) / n;
      const double var =
          n > 1 ? std::max(0.0, (static_cast<double>(sum_sq) - n * mean * mean) / (n - 1)) : 0.0;
      curves[rules[r]].push_back({sinr, mean, std::sqrt(var / n), n_trials});
    }
  }
  return curves;
}

std::vector<CurvePoint> mvmp_curve(SelectionRule rule, const Scenario& scn,
                                   std::span<const double> sinr_grid, std::int64_t n_trials,
                                   std::uint64_t seed, int workers) {
  const SelectionRule rules[] = {rule};
  return mvmp_curves(rules, scn, sinr_grid, n_trials, seed, workers).at(rule);
}

std::vector<TimingRow> benchmark(std::span<const DetectorKind> kinds, const Scenario& scn,
                                 std::int64_t n_trials, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const SceneGenerator generator(scn);
  const ComplexVector& v = generator.steering();
  const auto clairvoyant = clairvoyant_inputs(scn);
  const std::uint64_t phase_seed = mix_seed(seed, static_cast<std::uint64_t>(Phase::Benchmark));
  std::vector<double> sum(kinds.size(), 0.0), sum_sq(kinds.size(), 0.0);
  double sink = 0;

  // One untimed pass to warm caches and allocators.
  constexpr std::int64_t kWarmup = 5;
  for (std::int64_t t = -kWarmup; t < n_trials; ++t) {
    RngStream rng(phase_seed, static_cast<std::uint64_t>(t + kWarmup));
    const DataSet data = generator(rng);
    for (std::size_t d = 0; d < kinds.size(); ++d) {
      const auto start = clock::now();
      const DetectorReport report =
          detect(kinds[d], data, v, clairvoyant ? &*clairvoyant : nullptr);
      const double us = std::chrono::duration<double, std::micro>(clock::now() - start).count();
      sink += report.statistic;
      if (t >= 0) {
        sum[d] += us;
        sum_sq[d] += us * us;
      }
    }
  }
  [[maybe_unused]] static volatile double keep;
  keep = sink;

  std::vector<TimingRow> rows;
  const auto n = static_cast<double>(n_trials);
  for (std::size_t d = 0; d < kinds.size(); ++d) {
    const double mean = n > 0 ? sum[d] / n : 0.0;
    const double var = n > 1 ? std::max(0.0, (sum_sq[d] - n * mean * mean) / (n - 1)) : 0.0;
    rows.push_back({kinds[d], mean, var, n_trials});
  }
  return rows;
}

std::optional<double> crossing_sinr(const std::vector<CurvePoint>& curve, double level) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].value >= level) {
      if (i == 0) return curve[0].sinr_db;
      const auto& a = curve[i - 1];
      const auto& b = curve[i];
      return a.sinr_db + (level - a.value) * (b.sinr_db - a.sinr_db) / (b.value - a.value);
    }
  }
  return std::nullopt;
}

}  // namespace rcm
