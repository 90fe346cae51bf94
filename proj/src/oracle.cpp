#include "rcm/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rcm::oracle {

ComplexMatrix inverse(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  ComplexMatrix work = a;
  ComplexMatrix inv = ComplexMatrix::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(work(r, c)) > std::abs(work(pivot, c))) pivot = r;
    }
    if (std::abs(work(pivot, c)) == 0.0) throw std::domain_error("oracle::inverse: singular");
    work.row(c).swap(work.row(pivot));
    inv.row(c).swap(inv.row(pivot));
    const std::complex<double> d = work(c, c);
    work.row(c) /= d;
    inv.row(c) /= d;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == c) continue;
      const std::complex<double> f = work(r, c);
      if (f == 0.0) continue;
      work.row(r) -= f * work.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

std::complex<double> determinant(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  ComplexMatrix work = a;
  std::complex<double> det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(work(r, c)) > std::abs(work(pivot, c))) pivot = r;
    }
    if (pivot != c) {
      work.row(c).swap(work.row(pivot));
      det = -det;
    }
    det *= work(c, c);
    if (work(c, c) == 0.0) return 0.0;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const std::complex<double> f = work(r, c) / work(c, c);
      work.row(r) -= f * work.row(c);
    }
  }
  return det;
}

bool carries_signal(HypothesisIndex idx, int cell, int g) {
  if (cell == 1) return g >= 1 && g <= idx.l;
  return g >= idx.l + 1 && g <= idx.l + idx.h;
}

double p1(HypothesisIndex idx, int n_antennas, int n_pulses) {
  return 2.0 * (idx.l + idx.h) * std::log(4.0 * n_antennas * n_pulses);
}

double p2(HypothesisIndex idx, int n_antennas, int n_pulses, int n_training) {
  return (2.0 * idx.l + 2.0 * idx.h + double(n_antennas) * n_antennas) *
         std::log(4.0 * n_antennas * n_pulses + 2.0 * n_antennas * n_training);
}

double whitened_energy(const ComplexVector& z, const HermitianMatrix& a, const ComplexVector& v) {
  const ComplexMatrix inv = inverse(a);
  const std::complex<double> num = (z.adjoint() * inv * v)(0, 0);
  const std::complex<double> den = (v.adjoint() * inv * v)(0, 0);
  return std::norm(num) / den.real();
}

double lambda(const DataSet& data, HypothesisIndex idx, const HermitianMatrix& a,
              const ComplexVector& v) {
  double acc = 0;
  for (int i = 1; i <= idx.l; ++i) acc += whitened_energy(data.z1.col(i - 1), a, v);
  for (int w = idx.l + 1; w <= idx.l + idx.h; ++w) acc += whitened_energy(data.z2.col(w - 1), a, v);
  return acc;
}

HermitianMatrix scatter(const ComplexMatrix& r) { return r * r.adjoint(); }

HermitianMatrix augmented_scatter(const DataSet& data, HypothesisIndex idx) {
  HermitianMatrix s = scatter(data.r);
  const ComplexMatrix* cells[] = {&data.z1, &data.z2};
  for (int cell = 1; cell <= 2; ++cell) {
    for (int g = 1; g <= data.n_pulses(); ++g) {
      if (!carries_signal(idx, cell, g)) {
        const ComplexVector z = cells[cell - 1]->col(g - 1);
        s += z * z.adjoint();
      }
    }
  }
  return s;
}

namespace {

std::complex<double> alpha_hat(const ComplexVector& z, const HermitianMatrix& a,
                               const ComplexVector& v) {
  const ComplexMatrix inv = inverse(a);
  return (v.adjoint() * inv * z)(0, 0) / (v.adjoint() * inv * v)(0, 0);
}

// -ln of the CN(mean, m) density at x.
double neg_log_density(const ComplexVector& x, const ComplexVector& mean, const HermitianMatrix& m) {
  const ComplexVector d = x - mean;
  const double quad = (d.adjoint() * inverse(m) * d)(0, 0).real();
  return x.size() * std::log(std::numbers::pi) + std::log(determinant(m).real()) + quad;
}

template <typename Fn>
std::vector<double> over_grid(int n_pulses, Fn fn) {
  std::vector<double> out;
  HypothesisGrid(n_pulses).for_each([&](HypothesisIndex idx) { out.push_back(fn(idx)); });
  return out;
}

}  // namespace

HermitianMatrix unnormalized_m_hat(const DataSet& data, HypothesisIndex idx, const ComplexVector& v,
                                   const HermitianMatrix& alpha_scatter) {
  HermitianMatrix acc = oracle::augmented_scatter(data, idx);
  const ComplexMatrix* cells[] = {&data.z1, &data.z2};
  for (int cell = 1; cell <= 2; ++cell) {
    for (int g = 1; g <= data.n_pulses(); ++g) {
      if (carries_signal(idx, cell, g)) {
        const ComplexVector z = cells[cell - 1]->col(g - 1);
        const ComplexVector resid = z - alpha_hat(z, alpha_scatter, v) * v;
        acc += resid * resid.adjoint();
      }
    }
  }
  return acc;
}

std::vector<double> two_step_surface(const DataSet& data, const ComplexVector& v) {
  const HermitianMatrix s = scatter(data.r);
  const int na = static_cast<int>(v.size());
  const int k = data.n_training();
  return over_grid(data.n_pulses(), [&](HypothesisIndex idx) {
    return -2.0 * k * lambda(data, idx, s, v) + p1(idx, na, data.n_pulses());
  });
}

std::vector<double> one_step_surface(const DataSet& data, const ComplexVector& v) {
  const int na = static_cast<int>(v.size());
  const int np = data.n_pulses();
  const int k = data.n_training();
  const double dof = 2.0 * np + k;
  return over_grid(np, [&](HypothesisIndex idx) {
    const HermitianMatrix m =
        unnormalized_m_hat(data, idx, v, oracle::augmented_scatter(data, idx)) / dof;
    return (4.0 * np + 2.0 * k) * std::log(determinant(m).real()) + p2(idx, na, np, k);
  });
}

std::vector<double> one_step_reduced_surface(const DataSet& data, const ComplexVector& v) {
  const int na = static_cast<int>(v.size());
  const int np = data.n_pulses();
  const int k = data.n_training();
  const double dof = 2.0 * np + k;
  const HermitianMatrix s = scatter(data.r);
  return over_grid(np, [&](HypothesisIndex idx) {
    const HermitianMatrix m = unnormalized_m_hat(data, idx, v, s) / dof;
    return (4.0 * np + 2.0 * k) * std::log(determinant(m).real()) + p2(idx, na, np, k);
  });
}

std::vector<double> one_step_pdf_surface(const DataSet& data, const ComplexVector& v) {
  const int na = static_cast<int>(v.size());
  const int np = data.n_pulses();
  const int k = data.n_training();
  const double dof = 2.0 * np + k;
  const ComplexVector zero = ComplexVector::Zero(na);
  return over_grid(np, [&](HypothesisIndex idx) {
    const HermitianMatrix s_lh = oracle::augmented_scatter(data, idx);
    const HermitianMatrix m = unnormalized_m_hat(data, idx, v, s_lh) / dof;
    double nll = 0;
    for (int c = 0; c < k; ++c) nll += neg_log_density(data.r.col(c), zero, m);
    const ComplexMatrix* cells[] = {&data.z1, &data.z2};
    for (int cell = 1; cell <= 2; ++cell) {
      for (int g = 1; g <= np; ++g) {
        const ComplexVector z = cells[cell - 1]->col(g - 1);
        const ComplexVector mean =
            carries_signal(idx, cell, g) ? ComplexVector(alpha_hat(z, s_lh, v) * v) : zero;
        nll += neg_log_density(z, mean, m);
      }
    }
    return 2.0 * nll + p2(idx, na, np, k);
  });
}

HypothesisIndex argmin(const std::vector<double>& surface, int n_pulses) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < surface.size(); ++i) {
    if (surface[i] < surface[best]) best = i;
  }
  std::size_t pos = 0;
  HypothesisIndex found{};
  HypothesisGrid(n_pulses).for_each([&](HypothesisIndex idx) {
    if (pos++ == best) found = idx;
  });
  return found;
}

HypothesisIndex argmax(const std::vector<double>& surface, int n_pulses) {
  std::vector<double> negated(surface.size());
  for (std::size_t i = 0; i < surface.size(); ++i) negated[i] = -surface[i];
  return argmin(negated, n_pulses);
}

double osa2_log_glrt(const DataSet& data, const ComplexVector& v) {
  const int na = static_cast<int>(v.size());
  const int np = data.n_pulses();
  const int k = data.n_training();
  const double dof = 2.0 * np + k;
  const ComplexVector zero = ComplexVector::Zero(na);
  const ComplexMatrix* cells[] = {&data.z1, &data.z2};

  // H_0: every column zero-mean with covariance (S + Z Z^H) / (2N_p + K).
  HermitianMatrix m0 = scatter(data.r);
  for (const ComplexMatrix* cell : cells) m0 += (*cell) * cell->adjoint();
  m0 /= dof;
  double null_ll = 0;
  for (int c = 0; c < k; ++c) null_ll -= neg_log_density(data.r.col(c), zero, m0);
  for (const ComplexMatrix* cell : cells) {
    for (int g = 0; g < np; ++g) null_ll -= neg_log_density(cell->col(g), zero, m0);
  }

  double best = -std::numeric_limits<double>::infinity();
  HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
    const HermitianMatrix s_lh = oracle::augmented_scatter(data, idx);
    const HermitianMatrix m = unnormalized_m_hat(data, idx, v, s_lh) / dof;
    double ll = 0;
    for (int c = 0; c < k; ++c) ll -= neg_log_density(data.r.col(c), zero, m);
    for (int cell = 1; cell <= 2; ++cell) {
      for (int g = 1; g <= np; ++g) {
        const ComplexVector z = cells[cell - 1]->col(g - 1);
        const ComplexVector mean =
            carries_signal(idx, cell, g) ? ComplexVector(alpha_hat(z, s_lh, v) * v) : zero;
        ll -= neg_log_density(z, mean, m);
      }
    }
    best = std::max(best, ll - p2(idx, na, np, k) / 2.0);
  });
  return best - null_ll;
}

double statistic(DetectorKind kind, const DataSet& data, const ComplexVector& v,
                 const ClairvoyantInputs* clairvoyant) {
  const int na = static_cast<int>(v.size());
  const int np = data.n_pulses();
  const int k = data.n_training();
  const HermitianMatrix s = scatter(data.r);
  switch (kind) {
    case DetectorKind::TSA1:
      return lambda(data, argmin(two_step_surface(data, v), np), s, v);
    case DetectorKind::TSA2:
      return lambda(data, argmin(one_step_surface(data, v), np), s, v);
    case DetectorKind::MTSA1: {
      const auto idx = argmin(two_step_surface(data, v), np);
      return lambda(data, idx, oracle::augmented_scatter(data, idx), v);
    }
    case DetectorKind::MTSA2: {
      const auto idx = argmin(one_step_reduced_surface(data, v), np);
      return lambda(data, idx, oracle::augmented_scatter(data, idx), v);
    }
    case DetectorKind::OSA1: {
      double best = -std::numeric_limits<double>::infinity();
      HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
        best = std::max(best, lambda(data, idx, s, v) - p1(idx, na, np) / (2.0 * k));
      });
      return best;
    }
    case DetectorKind::OSA2: {
      const double dof = 2.0 * np + k;
      HermitianMatrix m0 = s + data.z1 * data.z1.adjoint() + data.z2 * data.z2.adjoint();
      double best = -std::numeric_limits<double>::infinity();
      HypothesisGrid(np).for_each([&](HypothesisIndex idx) {
        const HermitianMatrix m =
            unnormalized_m_hat(data, idx, v, oracle::augmented_scatter(data, idx)) / dof;
        best = std::max(best, -std::log(determinant(m).real()) -
                                  p2(idx, na, np, k) / (4.0 * np + 2.0 * k));
      });
      return std::log(determinant(m0 / dof).real()) + best;
    }
    case DetectorKind::GAMF:
      return lambda(data, HypothesisIndex{np, 0}, s, v) +
             [&] {
               double acc = 0;
               for (int g = 0; g < np; ++g) acc += whitened_energy(data.z2.col(g), s, v);
               return acc;
             }();
    case DetectorKind::GASD: {
      const ComplexMatrix inv = inverse(s);
      double acc = 0;
      for (const ComplexMatrix* cell : {&data.z1, &data.z2}) {
        for (int g = 0; g < np; ++g) {
          const ComplexVector z = cell->col(g);
          const double num = std::norm((z.adjoint() * inv * v)(0, 0));
          const double vq = (v.adjoint() * inv * v)(0, 0).real();
          const double zq = (z.adjoint() * inv * z)(0, 0).real();
          acc += num / (vq * zq);
        }
      }
      return acc;
    }
    case DetectorKind::CLAIRVOYANT:
      if (!clairvoyant) throw std::invalid_argument("oracle: clairvoyant inputs missing");
      return lambda(data, clairvoyant->truth, clairvoyant->true_m, v);
  }
  return 0;
}

Instance random_instance(RngStream& rng, int n_antennas, int n_pulses, int n_training) {
  Instance out;
  out.v = steering_vector(rng.uniform() - 0.5, n_antennas);
  const int l = 1 + static_cast<int>(rng.uniform() * n_pulses);
  const int h = static_cast<int>(rng.uniform() * (n_pulses - l + 1));
  out.truth = {std::min(l, n_pulses), std::min(h, n_pulses - std::min(l, n_pulses))};
  out.true_m = HermitianMatrix::Identity(n_antennas, n_antennas);
  auto block = [&](int cols) {
    ComplexMatrix m(n_antennas, cols);
    for (int c = 0; c < cols; ++c) {
      for (int i = 0; i < n_antennas; ++i) m(i, c) = rng.complex_normal();
    }
    return m;
  };
  out.data.z1 = block(n_pulses);
  out.data.z2 = block(n_pulses);
  out.data.r = block(n_training);
  const double strength = 3.0 * rng.uniform();
  for (int g = 1; g <= n_pulses; ++g) {
    const std::complex<double> a1 = strength * rng.complex_normal();
    const std::complex<double> a2 = strength * rng.complex_normal();
    if (carries_signal(out.truth, 1, g)) out.data.z1.col(g - 1) += a1 * out.v;
    if (carries_signal(out.truth, 2, g)) out.data.z2.col(g - 1) += a2 * out.v;
  }
  return out;
}

}  // namespace rcm::oracle
