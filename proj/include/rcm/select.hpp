#pragma once

// BIC rules for the migration indices. Each returns the minimizing (l,h) and
// the whole objective surface in HypothesisGrid order.

#include <optional>
#include <string_view>
#include <vector>

#include "rcm/hypothesis.hpp"
#include "rcm/scene.hpp"
#include "rcm/stats.hpp"

namespace rcm {

enum class SelectionRule { TwoStep, OneStep, OneStepReduced };

std::string_view to_string(SelectionRule rule);
/// Accepts "two_step", "one_step", "one_step_reduced"; throws ConfigError.
SelectionRule parse_selection_rule(std::string_view name);

/// Objective values equal within this absolute tolerance are ties; ties go to
/// the lexicographically smallest (l,h).
inline constexpr double kTieTolerance = 1e-12;

struct SelectionResult {
  HypothesisIndex chosen;
  std::vector<double> surface;
  int n_pulses = 0;

  double objective(HypothesisIndex idx) const { return surface[HypothesisGrid(n_pulses).offset(idx)]; }
};

/// First grid point, in lexicographic order, within kTieTolerance of the minimum.
HypothesisIndex grid_argmin(const std::vector<double>& surface, int n_pulses);
/// First grid point within kTieTolerance of the maximum.
HypothesisIndex grid_argmax(const std::vector<double>& surface, int n_pulses);

/// min over the grid of -2K Lambda_{l,h}(Z,S) + p1(l,h).
SelectionResult select_two_step(const DataSet& data, const ComplexVector& v);
SelectionResult select_two_step(const EnergyTable& table, int n_antennas, int n_training);

/// min over the grid of (4N_p + 2K) ln det M_{l,h} + p2(l,h); one S_{l,h}
/// factorization per grid point.
SelectionResult select_one_step(const DataSet& data, const ComplexVector& v);
SelectionResult select_one_step(const ScatterCache& cache, const ComplexVector& v);

/// As select_one_step with M'_{l,h}: amplitudes against S, factorized once.
SelectionResult select_one_step_reduced(const DataSet& data, const ComplexVector& v);
SelectionResult select_one_step_reduced(const ScatterCache& cache, const ComplexVector& v,
                                        const Factorization<double>& base);

SelectionResult select(SelectionRule rule, const DataSet& data, const ComplexVector& v);

}  // namespace rcm
