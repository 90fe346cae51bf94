#pragma once

#include <optional>
#include <vector>

#include "rcm/hypothesis.hpp"
#include "rcm/linalg.hpp"
#include "rcm/rng.hpp"

namespace rcm {

/// Exponentially correlated clutter plus white noise:
/// M(i,k) = clutter_power * rho^|i-k| + noise_power * delta_ik.
struct CovarianceParams {
  double clutter_power = 1.0;
  double one_lag_correlation = 0.9;
  double noise_power = 0.01;

  friend bool operator==(const CovarianceParams&, const CovarianceParams&) = default;
};

/// Radial motion used to derive the migration schedule, plus the optional
/// raised-cosine taper width (in pulses) on each side of the cell transition.
struct Kinematics {
  double v_t = 30.0;
  double prt = 1e-3;
  double range_resolution = 0.3;
  int taper_pulses = 0;

  friend bool operator==(const Kinematics&, const Kinematics&) = default;
};

struct Scenario {
  int n_antennas = 8;
  int n_pulses = 16;
  int n_training = 12;
  double spatial_frequency = 0.1;
  std::optional<HypothesisIndex> true_hypothesis = HypothesisIndex{10, 6};
  double sinr_db = 10.0;
  CovarianceParams covariance_params;
  std::optional<Kinematics> kinematics = Kinematics{};

  /// Throws ConfigError on any violated field bound.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Two cells under test and the training block.
struct DataSet {
  ComplexMatrix z1;  // N_a x N_p
  ComplexMatrix z2;  // N_a x N_p
  ComplexMatrix r;   // N_a x K

  Eigen::Index n_antennas() const { return z1.rows(); }
  int n_pulses() const { return static_cast<int>(z1.cols()); }
  int n_training() const { return static_cast<int>(r.cols()); }
};

/// exp(j 2 pi m nu_s), m = 0..n_antennas-1.
ComplexVector steering_vector(double nu_s, int n_antennas);

HermitianMatrix make_covariance(const CovarianceParams& p, int n_antennas);

/// Number of pulses spent in cell 1 before the cumulative walk (g-1) v_t T
/// reaches one range cell; (N_p, 0) when the target never leaves cell 1.
HypothesisIndex migration_schedule(double v_t, double prt, double range_resolution, int n_pulses);

/// sigma_alpha^2 = 10^(sinr_db/10) / (v^H M^{-1} v), the per-pulse Swerling II
/// amplitude variance for a requested per-pulse SINR.
double sinr_to_amplitude_variance(double sinr_db, const HermitianMatrix& m, const ComplexVector& v);

/// Generator with the covariance factor and signal layout precomputed; one
/// instance serves every trial of a Monte-Carlo point.
class SceneGenerator {
 public:
  /// When `with_signal` is false the data follow H_0 regardless of the
  /// scenario's true hypothesis.
  explicit SceneGenerator(const Scenario& scn, bool with_signal = true);

  /// Draw order is fixed and independent of the SINR: Z1 columns, Z2 columns,
  /// R columns, then one unit amplitude per pulse for each cell. Changing only
  /// the SINR therefore keeps every noise sample of a stream.
  DataSet operator()(RngStream& rng) const;

  const ComplexVector& steering() const { return steering_; }
  const HermitianMatrix& covariance() const { return covariance_; }
  double amplitude_variance() const { return amplitude_variance_; }
  /// Per-pulse amplitude gains, zero where the cell carries no target.
  const Eigen::VectorXd& cell1_gain() const { return gain1_; }
  const Eigen::VectorXd& cell2_gain() const { return gain2_; }

 private:
  Scenario scn_;
  ComplexVector steering_;
  HermitianMatrix covariance_;
  ComplexMatrix color_;  // lower Cholesky factor of M
  double amplitude_variance_ = 0;
  Eigen::VectorXd gain1_, gain2_;
};

DataSet generate(const Scenario& scn, RngStream& rng);

}  // namespace rcm
