#include "rcm/detect.hpp"

#include <cmath>
#include <string>

namespace rcm {

std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::TSA1: return "tsa1";
    case DetectorKind::TSA2: return "tsa2";
    case DetectorKind::MTSA1: return "mtsa1";
    case DetectorKind::MTSA2: return "mtsa2";
    case DetectorKind::OSA1: return "osa1";
    case DetectorKind::OSA2: return "osa2";
    case DetectorKind::GAMF: return "gamf";
    case DetectorKind::GASD: return "gasd";
    case DetectorKind::CLAIRVOYANT: return "clairvoyant";
  }
  return "unknown";
}

DetectorKind parse_detector_kind(std::string_view name) {
  for (DetectorKind kind : kAllDetectors) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown detector '" + std::string(name) + "'");
}

namespace {

EnergyTable base_energies(const DataSet& data, const Factorization<double>& scatter,
                          const ComplexVector& v) {
  return energy_table(data.z1, data.z2, scatter, v);
}

double gamf_from_table(const EnergyTable& t) {
  const int np = t.n_pulses();
  return t.prefix1(np) + t.prefix2(np);
}

double m_tsa_from_cache(const ScatterCache& cache, const DataSet& data, HypothesisIndex idx,
                        const ComplexVector& v) {
  const auto augmented = factorize(cache.augmented(idx));
  return lambda(energy_table(data.z1, data.z2, augmented, v), idx);
}

std::pair<double, HypothesisIndex> osa1_from_table(const EnergyTable& t, int n_antennas,
                                                   int n_training) {
  const int np = t.n_pulses();
  std::vector<double> surface;
  surface.reserve(HypothesisGrid(np).size());
  HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
    surface.push_back(lambda(t, idx) - penalty_p1(idx, n_antennas, np) / (2.0 * n_training));
  });
  const HypothesisIndex best = grid_argmax(surface, np);
  return {surface[HypothesisGrid(np).offset(best)], best};
}

std::pair<double, HypothesisIndex> osa2_from_surface(const ScatterCache& cache,
                                                     const SelectionResult& one_step,
                                                     int n_antennas) {
  const int np = cache.n_pulses();
  const double dof = 2.0 * np + cache.n_training();
  const double weight = 2.0 * dof;
  // (4N_p + 2K) ln det M_{l,h} + p2 -> -ln det M_{l,h} - p2 / (4N_p + 2K)
  std::vector<double> penalized(one_step.surface.size());
  for (std::size_t i = 0; i < penalized.size(); ++i) penalized[i] = -one_step.surface[i] / weight;
  const HypothesisIndex best = grid_argmax(penalized, np);
  const double null_log_det = log_det(factorize(cache.total())) - n_antennas * std::log(dof);
  return {null_log_det + penalized[HypothesisGrid(np).offset(best)], best};
}

double gasd_from(const DataSet& data, const Factorization<double>& scatter,
                 const ComplexVector& v) {
  const ComplexVector w = scatter.solve(v);
  const double q = v.dot(w).real();
  double acc = 0;
  for (const ComplexMatrix* cell : {&data.z1, &data.z2}) {
    const ComplexMatrix white = scatter.whiten(*cell);
    for (Eigen::Index g = 0; g < cell->cols(); ++g) {
      const double energy = white.col(g).squaredNorm();
      if (energy == 0) {
        throw ZeroColumn("gasd: primary column " + std::to_string(g + 1) + " is zero");
      }
      acc += std::norm(w.dot(cell->col(g))) / (q * energy);
    }
  }
  return acc;
}

double clairvoyant_from(const DataSet& data, HypothesisIndex truth,
                        const Factorization<double>& true_m, const ComplexVector& v) {
  require_on_grid(truth, data.n_pulses());
  return lambda(energy_table(data.z1, data.z2, true_m, v), truth);
}

}  // namespace

double tsa_statistic(const DataSet& data, HypothesisIndex idx, const ComplexVector& v) {
  return lambda(base_energies(data, factorize(sample_scatter(data.r)), v), idx);
}

double m_tsa_statistic(const DataSet& data, HypothesisIndex idx, const ComplexVector& v) {
  const auto augmented = factorize(augmented_scatter(data, idx));
  return lambda(energy_table(data.z1, data.z2, augmented, v), idx);
}

std::pair<double, HypothesisIndex> osa1_statistic(const DataSet& data, const ComplexVector& v) {
  return osa1_from_table(base_energies(data, factorize(sample_scatter(data.r)), v),
                         static_cast<int>(data.n_antennas()), data.n_training());
}

std::pair<double, HypothesisIndex> osa2_statistic(const DataSet& data, const ComplexVector& v) {
  const ScatterCache cache(data);
  return osa2_from_surface(cache, select_one_step(cache, v), static_cast<int>(v.size()));
}

double gamf_statistic(const DataSet& data, const ComplexVector& v) {
  return gamf_from_table(base_energies(data, factorize(sample_scatter(data.r)), v));
}

double gasd_statistic(const DataSet& data, const ComplexVector& v) {
  return gasd_from(data, factorize(sample_scatter(data.r)), v);
}

double clairvoyant_statistic(const DataSet& data, HypothesisIndex truth,
                             const HermitianMatrix& true_m, const ComplexVector& v) {
  return clairvoyant_from(data, truth, factorize(true_m), v);
}

DetectorReport detect(DetectorKind kind, const DataSet& data, const ComplexVector& v,
                      const ClairvoyantInputs* clairvoyant) {
  DetectorReport report{kind, 0.0, std::nullopt};
  switch (kind) {
    case DetectorKind::TSA1: {
      const auto chosen = select_two_step(data, v).chosen;
      report = {kind, tsa_statistic(data, chosen, v), chosen};
      break;
    }
    case DetectorKind::TSA2: {
      const auto chosen = select_one_step(data, v).chosen;
      report = {kind, tsa_statistic(data, chosen, v), chosen};
      break;
    }
    case DetectorKind::MTSA1: {
      const auto chosen = select_two_step(data, v).chosen;
      report = {kind, m_tsa_statistic(data, chosen, v), chosen};
      break;
    }
    case DetectorKind::MTSA2: {
      const auto chosen = select_one_step_reduced(data, v).chosen;
      report = {kind, m_tsa_statistic(data, chosen, v), chosen};
      break;
    }
    case DetectorKind::OSA1: {
      const auto [value, chosen] = osa1_statistic(data, v);
      report = {kind, value, chosen};
      break;
    }
    case DetectorKind::OSA2: {
      const auto [value, chosen] = osa2_statistic(data, v);
      report = {kind, value, chosen};
      break;
    }
    case DetectorKind::GAMF:
      report.statistic = gamf_statistic(data, v);
      break;
    case DetectorKind::GASD:
      report.statistic = gasd_statistic(data, v);
      break;
    case DetectorKind::CLAIRVOYANT:
      if (clairvoyant == nullptr) {
        throw MissingClairvoyantInputs("clairvoyant detector needs the true (l,h) and M");
      }
      report.statistic = clairvoyant_statistic(data, clairvoyant->truth, clairvoyant->true_m, v);
      report.estimated = clairvoyant->truth;
      break;
  }
  return report;
}

DetectorBank::DetectorBank(std::vector<DetectorKind> kinds, ComplexVector v,
                           std::optional<ClairvoyantInputs> clairvoyant)
    : kinds_(std::move(kinds)), v_(std::move(v)) {
  if (clairvoyant) {
    truth_ = clairvoyant->truth;
    true_m_ = factorize(clairvoyant->true_m);
  }
  for (DetectorKind kind : kinds_) {
    if (kind == DetectorKind::CLAIRVOYANT && !truth_) {
      throw MissingClairvoyantInputs("clairvoyant detector needs the true (l,h) and M");
    }
  }
}

std::vector<DetectorReport> DetectorBank::evaluate(const DataSet& data) const {
  const int na = static_cast<int>(v_.size());
  const int k = data.n_training();

  std::optional<Factorization<double>> scatter;
  std::optional<EnergyTable> table;
  std::optional<ScatterCache> cache;
  std::optional<SelectionResult> two_step, one_step, reduced;

  auto need_scatter = [&]() -> const Factorization<double>& {
    if (!scatter) scatter = factorize(sample_scatter(data.r));
    return *scatter;
  };
  auto need_table = [&]() -> const EnergyTable& {
    if (!table) table = base_energies(data, need_scatter(), v_);
    return *table;
  };
  auto need_cache = [&]() -> const ScatterCache& {
    if (!cache) cache.emplace(data);
    return *cache;
  };
  auto need_two_step = [&]() -> const SelectionResult& {
    if (!two_step) two_step = select_two_step(need_table(), na, k);
    return *two_step;
  };
  auto need_one_step = [&]() -> const SelectionResult& {
    if (!one_step) one_step = select_one_step(need_cache(), v_);
    return *one_step;
  };
  auto need_reduced = [&]() -> const SelectionResult& {
    if (!reduced) reduced = select_one_step_reduced(need_cache(), v_, need_scatter());
    return *reduced;
  };

  std::vector<DetectorReport> reports;
  reports.reserve(kinds_.size());
  for (DetectorKind kind : kinds_) {
    DetectorReport report{kind, 0.0, std::nullopt};
    switch (kind) {
      case DetectorKind::TSA1: {
        const auto chosen = need_two_step().chosen;
        report = {kind, lambda(need_table(), chosen), chosen};
        break;
      }
      case DetectorKind::TSA2: {
        const auto chosen = need_one_step().chosen;
        report = {kind, lambda(need_table(), chosen), chosen};
        break;
      }
      case DetectorKind::MTSA1: {
        const auto chosen = need_two_step().chosen;
        report = {kind, m_tsa_from_cache(need_cache(), data, chosen, v_), chosen};
        break;
      }
      case DetectorKind::MTSA2: {
        const auto chosen = need_reduced().chosen;
        report = {kind, m_tsa_from_cache(need_cache(), data, chosen, v_), chosen};
        break;
      }
      case DetectorKind::OSA1: {
        const auto [value, chosen] = osa1_from_table(need_table(), na, k);
        report = {kind, value, chosen};
        break;
      }
      case DetectorKind::OSA2: {
        const auto [value, chosen] = osa2_from_surface(need_cache(), need_one_step(), na);
        report = {kind, value, chosen};
        break;
      }
      case DetectorKind::GAMF:
        report.statistic = gamf_from_table(need_table());
        break;
      case DetectorKind::GASD:
        report.statistic = gasd_from(data, need_scatter(), v_);
        break;
      case DetectorKind::CLAIRVOYANT:
        report.statistic = clairvoyant_from(data, *truth_, *true_m_, v_);
        report.estimated = truth_;
        break;
    }
    reports.push_back(report);
  }
  return reports;
}

}  // namespace rcm
