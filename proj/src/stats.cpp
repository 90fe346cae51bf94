#include "rcm/stats.hpp"

#include <cmath>

namespace rcm {

namespace {

void require_consistent(const DataSet& data) {
  if (data.z1.rows() != data.z2.rows() || data.z1.cols() != data.z2.cols() ||
      data.r.rows() != data.z1.rows()) {
    throw DimensionMismatch("data set blocks have inconsistent dimensions");
  }
}

}  // namespace

HermitianMatrix sample_scatter(const ComplexMatrix& r) {
  HermitianMatrix s = HermitianMatrix::Zero(r.rows(), r.rows());
  for (Eigen::Index k = 0; k < r.cols(); ++k) s = rank_one_accumulate(s, r.col(k), 1.0);
  return s;
}

EnergyTable energy_table(const ComplexMatrix& z1, const ComplexMatrix& z2,
                         const Factorization<double>& scatter, const ComplexVector& v) {
  if (z1.cols() != z2.cols() || z1.rows() != v.size() || z2.rows() != v.size()) {
    throw DimensionMismatch("energy_table: primary data and steering vector disagree");
  }
  const ComplexVector w = scatter.solve(v);
  EnergyTable t;
  t.v_quad = v.dot(w).real();
  const Eigen::Index np = z1.cols();
  t.e1 = (z1.adjoint() * w).cwiseAbs2() / t.v_quad;
  t.e2 = (z2.adjoint() * w).cwiseAbs2() / t.v_quad;
  t.prefix1.resize(np + 1);
  t.prefix2.resize(np + 1);
  t.prefix1(0) = t.prefix2(0) = 0;
  for (Eigen::Index g = 0; g < np; ++g) {
    t.prefix1(g + 1) = t.prefix1(g) + t.e1(g);
    t.prefix2(g + 1) = t.prefix2(g) + t.e2(g);
  }
  return t;
}

double lambda(const EnergyTable& table, HypothesisIndex idx) {
  require_on_grid(idx, table.n_pulses());
  return table.prefix1(idx.l) + (table.prefix2(idx.l + idx.h) - table.prefix2(idx.l));
}

ComplexMatrix signal_columns(const DataSet& data, HypothesisIndex idx) {
  require_on_grid(idx, data.n_pulses());
  ComplexMatrix cols(data.z1.rows(), idx.signal_pulses());
  cols.leftCols(idx.l) = data.z1.leftCols(idx.l);
  cols.rightCols(idx.h) = data.z2.middleCols(idx.l, idx.h);
  return cols;
}

AlphaEstimate alpha_mle(const ComplexMatrix& columns, const Factorization<double>& scatter,
                        const ComplexVector& v) {
  const ComplexVector w = scatter.solve(v);
  const double q = v.dot(w).real();
  // v^H S^{-1} z = w^H z
  return (columns.adjoint() * w).conjugate() / q;
}

HermitianMatrix augmented_scatter(const DataSet& data, HypothesisIndex idx) {
  require_consistent(data);
  require_on_grid(idx, data.n_pulses());
  const int np = data.n_pulses();
  HermitianMatrix s = sample_scatter(data.r);
  for (int i = idx.l; i < np; ++i) s = rank_one_accumulate(s, data.z1.col(i), 1.0);
  for (int w = 0; w < idx.l; ++w) s = rank_one_accumulate(s, data.z2.col(w), 1.0);
  for (int b = idx.l + idx.h; b < np; ++b) s = rank_one_accumulate(s, data.z2.col(b), 1.0);
  return s;
}

namespace {

HermitianMatrix assemble_m_hat(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                               const Factorization<double>& alpha_scatter) {
  HermitianMatrix acc = augmented_scatter(data, idx);
  const ComplexMatrix cols = signal_columns(data, idx);
  const AlphaEstimate alpha = alpha_mle(cols, alpha_scatter, v);
  for (Eigen::Index i = 0; i < cols.cols(); ++i) {
    acc = rank_one_accumulate(acc, ComplexVector(cols.col(i) - alpha(i) * v), 1.0);
  }
  return acc / static_cast<double>(2 * data.n_pulses() + data.n_training());
}

}  // namespace

HermitianMatrix m_hat(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                      const Factorization<double>& augmented) {
  return assemble_m_hat(data, idx, v, augmented);
}

HermitianMatrix m_hat_reduced(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                              const Factorization<double>& base) {
  return assemble_m_hat(data, idx, v, base);
}

double penalty_p1(HypothesisIndex idx, int n_antennas, int n_pulses) {
  require_on_grid(idx, n_pulses);
  return detail::penalty_fault_scale * 2.0 * idx.signal_pulses() *
         std::log(4.0 * n_antennas * n_pulses);
}

double penalty_p2(HypothesisIndex idx, int n_antennas, int n_pulses, int n_training) {
  require_on_grid(idx, n_pulses);
  const double params = 2.0 * idx.signal_pulses() + double(n_antennas) * n_antennas;
  return detail::penalty_fault_scale * params *
         std::log(4.0 * n_antennas * n_pulses + 2.0 * n_antennas * n_training);
}

ScatterCache::ScatterCache(const DataSet& data)
    : n_pulses_(data.n_pulses()), n_training_(data.n_training()) {
  require_consistent(data);
  training_ = sample_scatter(data.r);
  const auto na = data.n_antennas();
  prefix1_.reserve(n_pulses_ + 1);
  prefix2_.reserve(n_pulses_ + 1);
  prefix1_.push_back(HermitianMatrix::Zero(na, na));
  prefix2_.push_back(HermitianMatrix::Zero(na, na));
  for (int g = 0; g < n_pulses_; ++g) {
    prefix1_.push_back(rank_one_accumulate(prefix1_.back(), data.z1.col(g), 1.0));
    prefix2_.push_back(rank_one_accumulate(prefix2_.back(), data.z2.col(g), 1.0));
  }
  total_ = training_ + prefix1_.back() + prefix2_.back();
}

HermitianMatrix ScatterCache::signal(HypothesisIndex idx) const {
  require_on_grid(idx, n_pulses_);
  return prefix1_[idx.l] + (prefix2_[idx.l + idx.h] - prefix2_[idx.l]);
}

HermitianMatrix ScatterCache::augmented(HypothesisIndex idx) const {
  require_on_grid(idx, n_pulses_);
  return training_ + (prefix1_.back() - prefix1_[idx.l]) + prefix2_[idx.l] +
         (prefix2_.back() - prefix2_[idx.l + idx.h]);
}

double unnormalized_m_hat_log_det(const ScatterCache& cache, HypothesisIndex idx,
                                  const ComplexVector& v, const ComplexVector& w, double q) {
  const HermitianMatrix signal = cache.signal(idx);
  const ComplexVector qw = signal * w;
  const ComplexVector u = qw / q;
  const double c = w.dot(qw).real() / (q * q);
  HermitianMatrix m = cache.total();
  m.noalias() -= u * v.adjoint();
  m.noalias() -= v * u.adjoint();
  m.noalias() += c * (v * v.adjoint());
  return log_det(factorize(hermitian_part(m)));
}

}  // namespace rcm
