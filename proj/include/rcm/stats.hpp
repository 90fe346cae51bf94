#pragma once

// Sufficient statistics of the migration hypotheses: per-pulse whitened
// energies, the grid statistic Lambda_{l,h}, the scatter matrices S and
// S_{l,h}, amplitude MLEs, the covariance MLEs M_{l,h} and M'_{l,h}, and the
// BIC penalties.

#include <vector>

#include "rcm/hypothesis.hpp"
#include "rcm/linalg.hpp"
#include "rcm/scene.hpp"

namespace rcm {

/// e_c(g) = |z_{c,g}^H S^{-1} v|^2 / (v^H S^{-1} v) with prefix sums
/// prefix_c(n) = e_c(1) + ... + e_c(n), prefix_c(0) = 0.
struct EnergyTable {
  Eigen::VectorXd e1, e2;
  Eigen::VectorXd prefix1, prefix2;  // length N_p + 1
  double v_quad = 0;

  int n_pulses() const { return static_cast<int>(e1.size()); }
};

/// Amplitude MLEs ordered cell-1 pulses 1..l, then cell-2 pulses l+1..l+h.
using AlphaEstimate = ComplexVector;

/// S = R R^H.
HermitianMatrix sample_scatter(const ComplexMatrix& r);

EnergyTable energy_table(const ComplexMatrix& z1, const ComplexMatrix& z2,
                         const Factorization<double>& scatter, const ComplexVector& v);

/// Lambda_{l,h} = prefix1(l) + prefix2(l+h) - prefix2(l).
double lambda(const EnergyTable& table, HypothesisIndex idx);

/// Signal-bearing columns under H_{l,h}, in AlphaEstimate order.
ComplexMatrix signal_columns(const DataSet& data, HypothesisIndex idx);

/// v^H S^{-1} z_i / (v^H S^{-1} v) for each column z_i.
AlphaEstimate alpha_mle(const ComplexMatrix& columns, const Factorization<double>& scatter,
                        const ComplexVector& v);

/// S_{l,h}: training plus every primary column that is noise-only under H_{l,h}.
HermitianMatrix augmented_scatter(const DataSet& data, HypothesisIndex idx);

/// M_{l,h} with amplitudes estimated against S_{l,h} (passed factorized).
HermitianMatrix m_hat(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                      const Factorization<double>& augmented);

/// M'_{l,h}: as m_hat but amplitudes estimated against the fixed S.
HermitianMatrix m_hat_reduced(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                              const Factorization<double>& base);

/// p1(l,h) = 2 (l+h) ln(4 N_a N_p).
double penalty_p1(HypothesisIndex idx, int n_antennas, int n_pulses);

/// p2(l,h) = (2l + 2h + N_a^2) ln(4 N_a N_p + 2 N_a K).
double penalty_p2(HypothesisIndex idx, int n_antennas, int n_pulses, int n_training);

/// Prefix sums of per-pulse outer products for one data set. Every S_{l,h} and
/// every signal-column scatter is then an O(N_a^2) combination of cached
/// matrices instead of a fresh O(N_p N_a^2) accumulation.
class ScatterCache {
 public:
  explicit ScatterCache(const DataSet& data);

  int n_pulses() const { return n_pulses_; }
  int n_training() const { return n_training_; }
  /// R R^H.
  const HermitianMatrix& training() const { return training_; }
  /// R R^H + Z Z^H.
  const HermitianMatrix& total() const { return total_; }

  /// Sum of z z^H over the signal-bearing columns of H_{l,h}.
  HermitianMatrix signal(HypothesisIndex idx) const;
  /// S_{l,h} = total - signal(idx).
  HermitianMatrix augmented(HypothesisIndex idx) const;

 private:
  int n_pulses_;
  int n_training_;
  HermitianMatrix training_;
  HermitianMatrix total_;
  std::vector<HermitianMatrix> prefix1_, prefix2_;  // N_p + 1 entries each
};

/// ln det of (2N_p + K) M_{l,h} computed from the identity
///   S_{l,h} + sum (z - a v)(z - a v)^H = T - u v^H - v u^H + c v v^H,
/// T = R R^H + Z Z^H, u = Q w / q, c = w^H Q w / q^2, Q the signal-column
/// scatter, w = A^{-1} v and q = v^H w for the scatter A the amplitudes are
/// estimated against.
double unnormalized_m_hat_log_det(const ScatterCache& cache, HypothesisIndex idx,
                                  const ComplexVector& v, const ComplexVector& w, double q);

namespace detail {
/// Multiplier applied to both penalties; 1 except under selftest fault
/// injection.
inline thread_local double penalty_fault_scale = 1.0;
}  // namespace detail

/// Perturbs p1 and p2 on the current thread for the lifetime of the guard.
class ScopedPenaltyFault {
 public:
  explicit ScopedPenaltyFault(double scale) : saved_(detail::penalty_fault_scale) {
    detail::penalty_fault_scale = scale;
  }
  ~ScopedPenaltyFault() { detail::penalty_fault_scale = saved_; }
  ScopedPenaltyFault(const ScopedPenaltyFault&) = delete;
  ScopedPenaltyFault& operator=(const ScopedPenaltyFault&) = delete;

 private:
  double saved_;
};

}  // namespace rcm
