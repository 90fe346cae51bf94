#include "rcm/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rcm {

void Scenario::validate() const {
  if (n_antennas < 1) throw ConfigError("scenario.n_antennas must be positive");
  if (n_pulses < 1) throw ConfigError("scenario.n_pulses must be positive");
  if (n_training < 0) throw ConfigError("scenario.n_training must be non-negative");
  if (!(spatial_frequency >= -0.5 && spatial_frequency < 0.5)) {
    throw ConfigError("scenario.spatial_frequency must lie in [-0.5, 0.5)");
  }
  if (true_hypothesis && !on_grid(*true_hypothesis, n_pulses)) {
    throw ConfigError("scenario.true_hypothesis (l=" + std::to_string(true_hypothesis->l) +
                      ", h=" + std::to_string(true_hypothesis->h) + ") is off the grid");
  }
  const auto& c = covariance_params;
  if (!(c.clutter_power >= 0)) throw ConfigError("covariance_params.clutter_power must be >= 0");
  if (!(c.one_lag_correlation >= 0 && c.one_lag_correlation < 1)) {
    throw ConfigError("covariance_params.one_lag_correlation must lie in [0, 1)");
  }
  if (!(c.noise_power > 0)) throw ConfigError("covariance_params.noise_power must be > 0");
  if (kinematics) {
    if (!(kinematics->prt > 0)) throw ConfigError("kinematics.prt must be > 0");
    if (!(kinematics->range_resolution > 0)) {
      throw ConfigError("kinematics.range_resolution must be > 0");
    }
    if (kinematics->taper_pulses < 0) throw ConfigError("kinematics.taper_pulses must be >= 0");
    if (true_hypothesis) {
      const HypothesisIndex implied = migration_schedule(kinematics->v_t, kinematics->prt,
                                                         kinematics->range_resolution, n_pulses);
      if (implied != *true_hypothesis) {
        throw ConfigError("scenario.true_hypothesis (l=" + std::to_string(true_hypothesis->l) +
                          ", h=" + std::to_string(true_hypothesis->h) +
                          ") disagrees with the kinematics, which imply (l=" +
                          std::to_string(implied.l) + ", h=" + std::to_string(implied.h) + ")");
      }
    }
  }
}

ComplexVector steering_vector(double nu_s, int n_antennas) {
  ComplexVector v(n_antennas);
  for (int m = 0; m < n_antennas; ++m) {
    const double phase = 2.0 * std::numbers::pi * m * nu_s;
    v(m) = {std::cos(phase), std::sin(phase)};
  }
  return v;
}

HermitianMatrix make_covariance(const CovarianceParams& p, int n_antennas) {
  HermitianMatrix m(n_antennas, n_antennas);
  for (int i = 0; i < n_antennas; ++i) {
    for (int k = 0; k < n_antennas; ++k) {
      const double clutter = p.clutter_power * std::pow(p.one_lag_correlation, std::abs(i - k));
      m(i, k) = clutter + (i == k ? p.noise_power : 0.0);
    }
  }
  return m;
}

HypothesisIndex migration_schedule(double v_t, double prt, double range_resolution,
                                   int n_pulses) {
  if (!(range_resolution > 0)) {
    throw NonPositiveResolution("migration_schedule: range resolution must be positive");
  }
  if (!(prt > 0)) throw std::invalid_argument("migration_schedule: PRT must be positive");
  const double walk = std::abs(v_t) * prt;
  if (walk == 0) return {n_pulses, 0};
  // Pulse g (1-based) is in cell 1 while (g-1) * walk < resolution.
  double ratio = range_resolution / walk;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) ratio = nearest;
  const double pulses_in_cell1 = std::ceil(ratio);
  if (pulses_in_cell1 >= n_pulses) return {n_pulses, 0};
  const int l = static_cast<int>(pulses_in_cell1);
  return {l, n_pulses - l};
}

double sinr_to_amplitude_variance(double sinr_db, const HermitianMatrix& m,
                                  const ComplexVector& v) {
  const auto f = factorize(m);
  const double v_quad = quad_form(f, v, v).real();
  return std::pow(10.0, sinr_db / 10.0) / v_quad;
}

namespace {

// Raised-cosine gain for the d-th pulse away from the cell transition (d >= 1).
double taper_gain(int distance, int width) {
  if (distance > width) return 1.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * distance / (width + 1)));
}

}  // namespace

SceneGenerator::SceneGenerator(const Scenario& scn, bool with_signal)
    : scn_(scn),
      steering_(steering_vector(scn.spatial_frequency, scn.n_antennas)),
      covariance_(make_covariance(scn.covariance_params, scn.n_antennas)),
      gain1_(Eigen::VectorXd::Zero(scn.n_pulses)),
      gain2_(Eigen::VectorXd::Zero(scn.n_pulses)) {
  scn.validate();
  color_ = factorize(covariance_).lower();
  if (!with_signal || !scn.true_hypothesis) return;

  amplitude_variance_ = sinr_to_amplitude_variance(scn.sinr_db, covariance_, steering_);
  const auto [l, h] = *scn.true_hypothesis;
  const int taper = scn.kinematics ? scn.kinematics->taper_pulses : 0;
  for (int g = 1; g <= l; ++g) {
    gain1_(g - 1) = (h > 0 && taper > 0) ? taper_gain(l - g + 1, taper) : 1.0;
  }
  for (int g = l + 1; g <= l + h; ++g) {
    gain2_(g - 1) = taper > 0 ? taper_gain(g - l, taper) : 1.0;
  }
}

DataSet SceneGenerator::operator()(RngStream& rng) const {
  const int na = scn_.n_antennas;
  const int np = scn_.n_pulses;
  const int k = scn_.n_training;
  auto white = [&](int cols) {
    ComplexMatrix w(na, cols);
    for (int c = 0; c < cols; ++c) {
      for (int i = 0; i < na; ++i) w(i, c) = rng.complex_normal();
    }
    return w;
  };

  DataSet data;
  data.z1.noalias() = color_.triangularView<Eigen::Lower>() * white(np);
  data.z2.noalias() = color_.triangularView<Eigen::Lower>() * white(np);
  data.r.noalias() = color_.triangularView<Eigen::Lower>() * white(k);

  const double sigma = std::sqrt(amplitude_variance_);
  for (int g = 0; g < np; ++g) {
    const std::complex<double> a1 = rng.complex_normal();
    const std::complex<double> a2 = rng.complex_normal();
    if (gain1_(g) != 0) data.z1.col(g) += (sigma * gain1_(g) * a1) * steering_;
    if (gain2_(g) != 0) data.z2.col(g) += (sigma * gain2_(g) * a2) * steering_;
  }
  return data;
}

DataSet generate(const Scenario& scn, RngStream& rng) { return SceneGenerator(scn)(rng); }

}  // namespace rcm
