// Test-only oracles, kept independent of the library's implementation path:
// plain-loop matrix assembly, eigenvalue-based log determinants, and exact
// truncated series evaluated directly from their definitions.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "ednet/design.hpp"
#include "ednet/rng.hpp"

namespace oracles {

// A(n) assembled entry by entry, no Eigen rank updates.
inline Eigen::MatrixXd info_matrix_direct(const Eigen::VectorXi& counts,
                                          const ednet::FeaturePool& pool,
                                          const ednet::LearnerDesign& design) {
  const int d = static_cast<int>(pool.dimension());
  Eigen::MatrixXd a = design.prior_precision;
  const double inv_var = 1.0 / (design.noise_std * design.noise_std);
  for (int i = 0; i < counts.size(); ++i)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        a(r, c) += counts[i] * inv_var * pool.features(r, i) *
                   pool.features(c, i);
  return a;
}

// log det via eigenvalues (a different route than Cholesky).
inline double log_det_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().array().log().sum();
}

inline double g_direct(const Eigen::VectorXi& counts,
                       const ednet::FeaturePool& pool,
                       const ednet::LearnerDesign& design) {
  return log_det_eigen(info_matrix_direct(counts, pool, design));
}

// Random well-conditioned instances for property tests.
struct RandomInstance {
  ednet::FeaturePool pool;
  ednet::LearnerDesign design;
};

inline RandomInstance random_instance(ednet::Rng& rng, int max_dim = 8,
                                      int max_features = 10) {
  RandomInstance inst;
  const int d = 1 + static_cast<int>(rng.next_u64() %
                                     static_cast<std::uint64_t>(max_dim));
  const int k = 1 + static_cast<int>(rng.next_u64() %
                                     static_cast<std::uint64_t>(max_features));
  inst.pool.features.resize(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) inst.pool.features(r, c) = rng.normal();

  // Prior precision Q diag(v) Q^T with eigenvalues in [0.5, 2].
  Eigen::MatrixXd raw(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) raw(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd eigs(d);
  for (int i = 0; i < d; ++i) eigs[i] = rng.uniform(0.5, 2.0);
  inst.design.prior_precision = q * eigs.asDiagonal() * q.transpose();
  inst.design.prior_precision =
      ((inst.design.prior_precision + inst.design.prior_precision.transpose()) /
       2.0)
          .eval();
  inst.design.prior_mean = Eigen::VectorXd::Zero(d);
  inst.design.noise_std = rng.uniform(0.5, 1.5);
  return inst;
}

inline Eigen::VectorXi random_counts(ednet::Rng& rng, int size, int max_count) {
  Eigen::VectorXi counts(size);
  for (int i = 0; i < size; ++i)
    counts[i] = static_cast<int>(
        rng.next_u64() % static_cast<std::uint64_t>(max_count + 1));
  return counts;
}

// Exact Poisson upper tail by pmf summation.
inline double poisson_tail_direct(double mean, int z) {
  double cum = 0.0;
  double term = std::exp(-mean);  // pmf(0)
  for (int n = 0; n < z; ++n) {
    cum += term;
    term *= mean / (n + 1);
  }
  return 1.0 - cum;
}

}  // namespace oracles
