#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "ednet/gradient.hpp"
#include "ednet/scenario.hpp"

namespace ednet {

/// Labeled samples delivered to one learner: (feature id, label) pairs.
struct LearnerDataset {
  int learner_node = -1;
  std::vector<std::pair<int, double>> rows;
};

/// Draws Poisson(lambda^l_x T) arrivals per (learner, feature) and labels
/// them with the learner's target model. One dataset per learner position.
std::vector<LearnerDataset> simulate_arrivals(const RateVector& rates,
                                              const Scenario& scenario,
                                              std::uint64_t seed);

/// Closed-form MAP estimate; returns the prior mean on an empty dataset.
Eigen::VectorXd map_estimate(const LearnerDataset& dataset,
                             const FeaturePool& pool,
                             const LearnerDesign& design);

struct EvalReport {
  std::vector<double> mean_error;  // per learner position, ||beta_hat - beta||
  std::vector<double> error_se;
  double mean_error_avg = 0.0;  // average over learners
  double error_se_avg = 0.0;
  UtilityEstimate utility;
  int realizations = 0;
  std::uint64_t seed = 0;
  bool fixed_beta = false;
  bool infeasible_input = false;  // evaluated as-given, flagged
  double max_violation = 0.0;
};

/// Simulates `realizations` independent worlds (model draw, arrivals, label
/// noise), trains MAP estimators, and reports estimation-error norms plus a
/// Monte Carlo utility evaluation of `rates`.
EvalReport estimation_error_report(const RateVector& rates,
                                   const Scenario& scenario, int realizations,
                                   std::uint64_t seed, bool fixed_beta = false,
                                   int utility_samples = 1000);

}  // namespace ednet
