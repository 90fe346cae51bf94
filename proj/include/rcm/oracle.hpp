#pragma once

// Definition-literal reference implementations used by the test suites and by
// `rcmsim selftest`. Nothing here calls into stats/select/detect: inverses and
// determinants come from plain Gauss-Jordan elimination, scatter matrices are
// assembled by testing every column for membership in the signal set, and the
// penalties are re-derived from their formulas.

#include <vector>

#include "rcm/detect.hpp"
#include "rcm/hypothesis.hpp"
#include "rcm/rng.hpp"
#include "rcm/scene.hpp"

namespace rcm::oracle {

/// Gauss-Jordan inverse with partial pivoting.
ComplexMatrix inverse(const ComplexMatrix& a);
/// Determinant by elimination with partial pivoting.
std::complex<double> determinant(const ComplexMatrix& a);

/// Is pulse g (1-based) of cell c in {1,2} signal-bearing under H_{l,h}?
bool carries_signal(HypothesisIndex idx, int cell, int g);

double p1(HypothesisIndex idx, int n_antennas, int n_pulses);
double p2(HypothesisIndex idx, int n_antennas, int n_pulses, int n_training);

/// |z^H A^{-1} v|^2 / (v^H A^{-1} v) with an explicit inverse of A.
double whitened_energy(const ComplexVector& z, const HermitianMatrix& a, const ComplexVector& v);

/// Lambda_{l,h}(Z, A) by direct double summation.
double lambda(const DataSet& data, HypothesisIndex idx, const HermitianMatrix& a,
              const ComplexVector& v);

HermitianMatrix scatter(const ComplexMatrix& r);
HermitianMatrix augmented_scatter(const DataSet& data, HypothesisIndex idx);

/// (2N_p + K) M_{l,h} assembled term by term; amplitudes against `alpha_scatter`.
HermitianMatrix unnormalized_m_hat(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                                   const HermitianMatrix& alpha_scatter);

/// Objective surfaces in HypothesisGrid order.
std::vector<double> two_step_surface(const DataSet& data, const ComplexVector& v);
std::vector<double> one_step_surface(const DataSet& data, const ComplexVector& v);
std::vector<double> one_step_reduced_surface(const DataSet& data, const ComplexVector& v);
/// -2 ln[f(R; M) f_{l,h}(Z; alpha, M)] + p2 with complex Gaussian densities
/// evaluated column by column at the MLEs.
std::vector<double> one_step_pdf_surface(const DataSet& data, const ComplexVector& v);

/// Lexicographically first minimum/maximum (exact comparison).
HypothesisIndex argmin(const std::vector<double>& surface, int n_pulses);
HypothesisIndex argmax(const std::vector<double>& surface, int n_pulses);

/// Detector statistic from its definition. The clairvoyant needs truth/true_m.
double statistic(DetectorKind kind, const DataSet& data, const ComplexVector& v,
                 const ClairvoyantInputs* clairvoyant = nullptr);

/// Penalized log-GLRT over both cells and the training data, with the H_0
/// covariance MLE and Gaussian densities evaluated literally.
double osa2_log_glrt(const DataSet& data, const ComplexVector& v);

/// Random small problem: CN(0, I) interference, random steering frequency,
/// random true (l,h) with amplitudes of random strength. Returns the steering
/// vector alongside the data.
struct Instance {
  DataSet data;
  ComplexVector v;
  HypothesisIndex truth;
  HermitianMatrix true_m;
};
Instance random_instance(RngStream& rng, int n_antennas, int n_pulses, int n_training);

}  // namespace rcm::oracle
