#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "ednet/errors.hpp"

namespace ednet {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Finite experiment set X. Feature vectors are the columns of `features`,
/// indexed by feature id 0..size()-1.
template <typename Scalar>
struct FeaturePoolT {
  MatrixX<Scalar> features;  // d x |X|

  Eigen::Index dimension() const { return features.rows(); }
  Eigen::Index size() const { return features.cols(); }

  typename MatrixX<Scalar>::ConstColXpr feature(Eigen::Index id) const {
    if (id < 0 || id >= size())
      throw UnknownFeature("feature id out of range: " + std::to_string(id));
    return features.col(id);
  }
};

using FeaturePool = FeaturePoolT<double>;

/// A learner's Bayesian linear regression setup: Gaussian prior
/// N(prior_mean, prior_precision^{-1}) and label noise level.
template <typename Scalar>
struct LearnerDesignT {
  MatrixX<Scalar> prior_precision;  // d x d symmetric positive definite
  VectorX<Scalar> prior_mean;       // d
  Scalar noise_std = Scalar(1);

  Eigen::Index dimension() const { return prior_precision.rows(); }

  void validate() const {
    if (prior_precision.rows() != prior_precision.cols())
      throw DimensionMismatch("prior_precision must be square");
    if (prior_mean.size() != prior_precision.rows())
      throw DimensionMismatch("prior_mean length must match prior_precision");
    if (!(noise_std > Scalar(0)))
      throw InvalidParams("noise_std must be positive");
    const Scalar asym =
        (prior_precision - prior_precision.transpose()).cwiseAbs().maxCoeff();
    const Scalar scale = prior_precision.cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-10) * std::max(scale, Scalar(1)))
      throw NotSymmetric("prior_precision is not symmetric");
    Eigen::LLT<MatrixX<Scalar>> llt(prior_precision);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("prior_precision is not positive definite");
  }
};

using LearnerDesign = LearnerDesignT<double>;

/// log det of a symmetric positive-definite matrix via Cholesky.
template <typename Scalar>
Scalar log_det_psd(const MatrixX<Scalar>& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("log_det_psd: not square");
  const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-10) * std::max(scale, Scalar(1)))
    throw NotSymmetric("log_det_psd: matrix is not symmetric");
  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("log_det_psd: Cholesky failed");
  return Scalar(2) * MatrixX<Scalar>(llt.matrixL()).diagonal().array().log().sum();
}

/// Information matrix A(n) = prior_precision + sum_x (n_x / sigma^2) x x^T
/// together with its Cholesky factor and the count vector that produced it.
/// Immutable from the caller's view; add_counts returns a new state.
template <typename Scalar>
class DesignStateT {
 public:
  DesignStateT(MatrixX<Scalar> info, Eigen::VectorXi counts)
      : info_(std::move(info)), counts_(std::move(counts)), llt_(info_) {
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("design state info matrix not PD");
  }

  const MatrixX<Scalar>& info_matrix() const { return info_; }
  const Eigen::VectorXi& counts() const { return counts_; }
  const Eigen::LLT<MatrixX<Scalar>>& llt() const { return llt_; }
  MatrixX<Scalar> chol_lower() const { return MatrixX<Scalar>(llt_.matrixL()); }
  Eigen::Index dimension() const { return info_.rows(); }

 private:
  MatrixX<Scalar> info_;
  Eigen::VectorXi counts_;
  Eigen::LLT<MatrixX<Scalar>> llt_;
};

using DesignState = DesignStateT<double>;

namespace detail {

template <typename Scalar>
MatrixX<Scalar> build_info_matrix(const Eigen::VectorXi& counts,
                                  const FeaturePoolT<Scalar>& pool,
                                  const LearnerDesignT<Scalar>& design) {
  if (counts.size() != pool.size())
    throw DimensionMismatch("counts length must equal pool size");
  if (pool.dimension() != design.dimension())
    throw DimensionMismatch("pool dimension must match design dimension");
  if ((counts.array() < 0).any())
    throw InvalidParams("counts must be nonnegative");
  MatrixX<Scalar> info = design.prior_precision;
  const Scalar inv_var = Scalar(1) / (design.noise_std * design.noise_std);
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    info.template selfadjointView<Eigen::Lower>().rankUpdate(
        pool.features.col(i), Scalar(counts[i]) * inv_var);
  }
  info.template triangularView<Eigen::StrictlyUpper>() =
      info.transpose().template triangularView<Eigen::StrictlyUpper>();
  return info;
}

}  // namespace detail

template <typename Scalar>
DesignStateT<Scalar> make_design_state(const FeaturePoolT<Scalar>& pool,
                                       const LearnerDesignT<Scalar>& design,
                                       const Eigen::VectorXi& counts) {
  return DesignStateT<Scalar>(detail::build_info_matrix(counts, pool, design),
                              counts);
}

template <typename Scalar>
DesignStateT<Scalar> make_design_state(const FeaturePoolT<Scalar>& pool,
                                       const LearnerDesignT<Scalar>& design) {
  return make_design_state(pool, design,
                           Eigen::VectorXi::Zero(pool.size()).eval());
}

/// D-optimal objective G(n) = log det A(n).
template <typename Scalar>
Scalar g_objective(const Eigen::VectorXi& counts,
                   const FeaturePoolT<Scalar>& pool,
                   const LearnerDesignT<Scalar>& design) {
  return log_det_psd<Scalar>(detail::build_info_matrix(counts, pool, design));
}

/// Closed-form gain G(n + k e_i) - G(n) = log(1 + (k/sigma^2) x^T A(n)^{-1} x),
/// evaluated with one triangular solve against the cached factor.
template <typename Scalar>
Scalar marginal_gain(const DesignStateT<Scalar>& state, Eigen::Index feature_id,
                     int k, const FeaturePoolT<Scalar>& pool,
                     const LearnerDesignT<Scalar>& design) {
  if (k < 1) throw InvalidParams("marginal_gain: k must be >= 1");
  if (feature_id < 0 || feature_id >= pool.size())
    throw UnknownFeature("marginal_gain: feature id out of range");
  if (state.dimension() != pool.dimension())
    throw DimensionMismatch("state dimension does not match pool");
  const VectorX<Scalar> half =
      state.llt().matrixL().solve(pool.features.col(feature_id));
  const Scalar quad = half.squaredNorm();  // x^T A^{-1} x
  const Scalar inv_var = Scalar(1) / (design.noise_std * design.noise_std);
  return std::log1p(Scalar(k) * inv_var * quad);
}

/// Returns a new state with counts[feature_id] += k. The factor is refreshed
/// by full refactorization.
template <typename Scalar>
DesignStateT<Scalar> add_counts(const DesignStateT<Scalar>& state,
                                Eigen::Index feature_id, int k,
                                const FeaturePoolT<Scalar>& pool,
                                const LearnerDesignT<Scalar>& design) {
  if (k < 1) throw InvalidParams("add_counts: k must be >= 1");
  if (feature_id < 0 || feature_id >= pool.size())
    throw UnknownFeature("add_counts: feature id out of range");
  Eigen::VectorXi counts = state.counts();
  counts[feature_id] += k;
  MatrixX<Scalar> info = state.info_matrix();
  const Scalar inv_var = Scalar(1) / (design.noise_std * design.noise_std);
  info.template selfadjointView<Eigen::Lower>().rankUpdate(
      pool.features.col(feature_id), Scalar(k) * inv_var);
  info.template triangularView<Eigen::StrictlyUpper>() =
      info.transpose().template triangularView<Eigen::StrictlyUpper>();
  return DesignStateT<Scalar>(std::move(info), std::move(counts));
}

/// Estimation-error covariance A(n)^{-1}.
template <typename Scalar>
MatrixX<Scalar> error_covariance(const DesignStateT<Scalar>& state) {
  const Eigen::Index d = state.dimension();
  MatrixX<Scalar> cov =
      state.llt().solve(MatrixX<Scalar>::Identity(d, d));
  cov = ((cov + cov.transpose()) / Scalar(2)).eval();  // enforce symmetry
  return cov;
}

/// Expected prediction error sigma^2 + x^T A(n)^{-1} x for a new point x.
template <typename Scalar>
Scalar expected_prediction_error(const DesignStateT<Scalar>& state,
                                 const VectorX<Scalar>& x,
                                 const LearnerDesignT<Scalar>& design) {
  if (x.size() != state.dimension())
    throw DimensionMismatch("expected_prediction_error: x has wrong length");
  const VectorX<Scalar> half = state.llt().matrixL().solve(x);
  return design.noise_std * design.noise_std + half.squaredNorm();
}

}  // namespace ednet
