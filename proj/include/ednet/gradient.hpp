#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ednet/network.hpp"
#include "ednet/rng.hpp"
#include "ednet/scenario.hpp"

namespace ednet {

struct EstimatorParams {
  int sample_count = 100;             // N joint arrival samples per learner
  double truncation_multiplier = 2.0; // n' = ceil(m * max lambda T) ...
  int explicit_truncation = -1;       // ... unless an explicit n' >= 0 is set
  int utility_samples = 1000;         // Monte Carlo draws for the objective

  void validate() const {
    if (sample_count < 1) throw InvalidParams("sample_count must be >= 1");
    if (explicit_truncation < 0 && truncation_multiplier < 1.0)
      throw InvalidParams("truncation multiplier must be >= 1");
    if (utility_samples < 1) throw InvalidParams("utility_samples must be >= 1");
  }
};

struct UtilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int sample_count = 0;
  std::uint64_t seed = 0;
};

/// Estimated dU/dlambda^l_x for all (learner, feature) pairs plus estimator
/// metadata. Matrices are |L| x |X|, indexed by learner position.
struct GradientEstimate {
  Eigen::MatrixXd partials;
  Eigen::MatrixXd std_errors;
  Eigen::MatrixXd head_coverage;  // lower bound on covered gradient mass
  Eigen::MatrixXi truncation;     // n' per coordinate
  int sample_count = 0;
  std::uint64_t seed = 0;

  double inf_norm() const {
    return partials.size() == 0 ? 0.0 : partials.cwiseAbs().maxCoeff();
  }

  /// Canonical LP objective: partials on learner-rate variables, zero on
  /// edge variables.
  Eigen::VectorXd lp_objective(const RateIndex& index) const;
};

/// Poisson(rate) variate; rate 0 always yields 0.
std::int64_t sample_poisson(double rate, Rng& rng);

/// log-space Poisson pmf, safe for large n.
double poisson_pmf(std::int64_t n, double mean);

/// Monte Carlo estimate of U(lambda) = sum_l E[G_l(n^l)] - G_l(0) with
/// n^l_x ~ Poisson(lambda^l_x T). Substreams keyed by (seed, learner, j).
UtilityEstimate estimate_utility(const RateVector& rates,
                                 const Scenario& scenario,
                                 const EstimatorParams& params,
                                 std::uint64_t seed);

/// Truncated, sampled gradient estimator: partial sums of conditional
/// marginal gains weighted by the Poisson law of the differentiated
/// coordinate. Joint samples are reused across truncation levels and
/// coordinates of one learner, with the conditioned coordinate overwritten.
GradientEstimate estimate_gradient(const RateVector& rates,
                                   const Scenario& scenario,
                                   const EstimatorParams& params,
                                   std::uint64_t seed);

/// Exact gradient by nested truncated summation; tractable only for |X| <= 3
/// and bounded per-learner rates. Test oracle for the estimator.
Eigen::MatrixXd exact_gradient_small(const RateVector& rates,
                                     const Scenario& scenario, double tol);

/// Exact utility by the same nested summation.
double exact_utility_small(const RateVector& rates, const Scenario& scenario,
                           double tol);

/// Subexponential Poisson upper tail bound P[N >= z] for N ~ Poisson(mean).
double poisson_tail_bound(double mean, double z);

/// Lower bound on the fraction of the true partial derivative captured by
/// truncating the series at n'.
double head_coverage(double lambda_t, std::int64_t n_prime);

}  // namespace ednet
