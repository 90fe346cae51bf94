#pragma once

// Six migration-aware detectors and three reference detectors. Each maps a
// data set to a raw statistic; thresholds are applied by the caller.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "rcm/hypothesis.hpp"
#include "rcm/scene.hpp"
#include "rcm/select.hpp"
#include "rcm/stats.hpp"

namespace rcm {

enum class DetectorKind { TSA1, TSA2, MTSA1, MTSA2, OSA1, OSA2, GAMF, GASD, CLAIRVOYANT };

inline constexpr std::array<DetectorKind, 9> kAllDetectors = {
    DetectorKind::TSA1, DetectorKind::TSA2, DetectorKind::MTSA1,
    DetectorKind::MTSA2, DetectorKind::OSA1, DetectorKind::OSA2,
    DetectorKind::GAMF, DetectorKind::GASD, DetectorKind::CLAIRVOYANT};

/// Lower-case CLI name: tsa1, tsa2, mtsa1, mtsa2, osa1, osa2, gamf, gasd, clairvoyant.
std::string_view to_string(DetectorKind kind);
/// Inverse of to_string; throws ConfigError on an unknown name.
DetectorKind parse_detector_kind(std::string_view name);

struct DetectorReport {
  DetectorKind kind = DetectorKind::GAMF;
  double statistic = 0;
  std::optional<HypothesisIndex> estimated;
};

/// Known (l,h) and covariance for the clairvoyant reference.
struct ClairvoyantInputs {
  HypothesisIndex truth;
  HermitianMatrix true_m;
};

/// Lambda_{l,h}(Z, S) with S = R R^H.
double tsa_statistic(const DataSet& data, HypothesisIndex idx, const ComplexVector& v);

/// Lambda_{l,h}(Z, S_{l,h}).
double m_tsa_statistic(const DataSet& data, HypothesisIndex idx, const ComplexVector& v);

/// max over the grid of Lambda_{l,h}(Z,S) - p1(l,h) / (2K), with its argmax.
std::pair<double, HypothesisIndex> osa1_statistic(const DataSet& data, const ComplexVector& v);

/// ln det((S + Z Z^H) / (2N_p + K)) + max over the grid of
/// (-ln det M_{l,h} - p2(l,h) / (4N_p + 2K)), with its argmax.
std::pair<double, HypothesisIndex> osa2_statistic(const DataSet& data, const ComplexVector& v);

/// Sum over all 2N_p primary columns of |z^H S^{-1} v|^2 / (v^H S^{-1} v).
double gamf_statistic(const DataSet& data, const ComplexVector& v);

/// Sum over all 2N_p primary columns of the adaptive coherence
/// |z^H S^{-1} v|^2 / ((v^H S^{-1} v)(z^H S^{-1} z)). Throws ZeroColumn.
double gasd_statistic(const DataSet& data, const ComplexVector& v);

/// Whitened matched-filter energy over the true signal columns, against M.
double clairvoyant_statistic(const DataSet& data, HypothesisIndex truth,
                             const HermitianMatrix& true_m, const ComplexVector& v);

DetectorReport detect(DetectorKind kind, const DataSet& data, const ComplexVector& v,
                      const ClairvoyantInputs* clairvoyant = nullptr);

/// Evaluates several detectors on one data set, computing each shared
/// intermediate (S factorization, energy table, each selection surface) once.
/// Results agree with per-kind detect() calls up to summation-order rounding.
class DetectorBank {
 public:
  DetectorBank(std::vector<DetectorKind> kinds, ComplexVector v,
               std::optional<ClairvoyantInputs> clairvoyant = std::nullopt);

  const std::vector<DetectorKind>& kinds() const { return kinds_; }
  std::vector<DetectorReport> evaluate(const DataSet& data) const;

 private:
  std::vector<DetectorKind> kinds_;
  ComplexVector v_;
  std::optional<HypothesisIndex> truth_;
  std::optional<Factorization<double>> true_m_;
};

}  // namespace rcm
