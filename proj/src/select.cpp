#include "rcm/select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rcm {

std::string_view to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::TwoStep: return "two_step";
    case SelectionRule::OneStep: return "one_step";
    case SelectionRule::OneStepReduced: return "one_step_reduced";
  }
  return "unknown";
}

SelectionRule parse_selection_rule(std::string_view name) {
  if (name == "two_step") return SelectionRule::TwoStep;
  if (name == "one_step") return SelectionRule::OneStep;
  if (name == "one_step_reduced") return SelectionRule::OneStepReduced;
  throw ConfigError("unknown selection rule '" + std::string(name) + "'");
}

namespace {

template <typename Better>
HypothesisIndex grid_extremum(const std::vector<double>& surface, int n_pulses, Better better) {
  const HypothesisGrid grid(n_pulses);
  if (surface.size() != grid.size()) throw DimensionMismatch("surface does not match grid");
  double best = surface.front();
  for (double value : surface) {
    if (better(value, best)) best = value;
  }
  std::size_t pos = 0;
  std::optional<HypothesisIndex> found;
  grid.for_each([&](HypothesisIndex idx) {
    if (!found && std::abs(surface[pos] - best) <= kTieTolerance) found = idx;
    ++pos;
  });
  return *found;
}

}  // namespace

HypothesisIndex grid_argmin(const std::vector<double>& surface, int n_pulses) {
  return grid_extremum(surface, n_pulses, [](double a, double b) { return a < b; });
}

HypothesisIndex grid_argmax(const std::vector<double>& surface, int n_pulses) {
  return grid_extremum(surface, n_pulses, [](double a, double b) { return a > b; });
}

SelectionResult select_two_step(const EnergyTable& table, int n_antennas, int n_training) {
  const int np = table.n_pulses();
  SelectionResult out;
  out.n_pulses = np;
  out.surface.reserve(HypothesisGrid(np).size());
  HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
    out.surface.push_back(-2.0 * n_training * lambda(table, idx) +
                          penalty_p1(idx, n_antennas, np));
  });
  out.chosen = grid_argmin(out.surface, np);
  return out;
}

SelectionResult select_two_step(const DataSet& data, const ComplexVector& v) {
  const auto scatter = factorize(sample_scatter(data.r));
  return select_two_step(energy_table(data.z1, data.z2, scatter, v),
                         static_cast<int>(data.n_antennas()), data.n_training());
}

SelectionResult select_one_step(const ScatterCache& cache, const ComplexVector& v) {
  const int np = cache.n_pulses();
  const int na = static_cast<int>(v.size());
  const int k = cache.n_training();
  const double dof = 2.0 * np + k;
  const double weight = 4.0 * np + 2.0 * k;
  SelectionResult out;
  out.n_pulses = np;
  out.surface.reserve(HypothesisGrid(np).size());
  HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
    const auto augmented = factorize(cache.augmented(idx));
    const ComplexVector w = augmented.solve(v);
    const double q = v.dot(w).real();
    const double ld = unnormalized_m_hat_log_det(cache, idx, v, w, q) - na * std::log(dof);
    out.surface.push_back(weight * ld + penalty_p2(idx, na, np, k));
  });
  out.chosen = grid_argmin(out.surface, np);
  return out;
}

SelectionResult select_one_step(const DataSet& data, const ComplexVector& v) {
  return select_one_step(ScatterCache(data), v);
}

SelectionResult select_one_step_reduced(const ScatterCache& cache, const ComplexVector& v,
                                        const Factorization<double>& base) {
  const int np = cache.n_pulses();
  const int na = static_cast<int>(v.size());
  const int k = cache.n_training();
  const double dof = 2.0 * np + k;
  const double weight = 4.0 * np + 2.0 * k;
  const ComplexVector w = base.solve(v);
  const double q = v.dot(w).real();
  SelectionResult out;
  out.n_pulses = np;
  out.surface.reserve(HypothesisGrid(np).size());
  HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
    const double ld = unnormalized_m_hat_log_det(cache, idx, v, w, q) - na * std::log(dof);
    out.surface.push_back(weight * ld + penalty_p2(idx, na, np, k));
  });
  out.chosen = grid_argmin(out.surface, np);
  return out;
}

SelectionResult select_one_step_reduced(const DataSet& data, const ComplexVector& v) {
  const ScatterCache cache(data);
  return select_one_step_reduced(cache, v, factorize(cache.training()));
}

SelectionResult select(SelectionRule rule, const DataSet& data, const ComplexVector& v) {
  switch (rule) {
    case SelectionRule::TwoStep: return select_two_step(data, v);
    case SelectionRule::OneStep: return select_one_step(data, v);
    case SelectionRule::OneStepReduced: return select_one_step_reduced(data, v);
  }
  throw ConfigError("unknown selection rule");
}

}  // namespace rcm
