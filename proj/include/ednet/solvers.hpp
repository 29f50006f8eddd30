#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ednet/gradient.hpp"
#include "ednet/lp.hpp"
#include "ednet/scenario.hpp"

namespace ednet {

enum class GradientMode { Estimated, ExactSeries };

struct PgaParams {
  int iterations = 100;
  int projection_iterations = 50;
  double step_scale = 0.05;  // eta = step_scale * lambda_max / ||g(0)||_inf
};

struct SolverParams {
  double delta = 0.01;  // Frank-Wolfe step fraction, in (0, 1]
  EstimatorParams estimator;
  std::uint64_t seed = 1;
  PgaParams pga;
  double alpha = 5.0;               // MaxAlpha fairness exponent, > 1
  double alpha_floor = 1e-6;        // gradient floor at zero aggregate rate
  GradientMode gradient_mode = GradientMode::Estimated;
  double exact_oracle_tol = 1e-10;  // series tolerance in ExactSeries mode
  /// Samples for the per-iterate utility diagnostic; 0 skips it.
  int trajectory_utility_samples = 100;
};

struct IterateRecord {
  int k = 0;
  double tau = 0.0;        // cumulative step fraction after this iteration
  double step = 0.0;       // gamma_k
  RateVector rates;        // lambda^k, the point the gradient was taken at
  double utility_estimate = 0.0;
  double utility_se = 0.0;
  double grad_inf_norm = 0.0;
  double lp_value = 0.0;  // <v^k, grad>; projection gap for PGA
};

struct SolveTrajectory {
  std::string algorithm;
  std::vector<IterateRecord> iterates;
  RateVector final;
  int lp_pivots_total = 0;
};

/// LP oracle over D that reuses the previous basis between solves.
class PolytopeOracle {
 public:
  explicit PolytopeOracle(const Scenario& scenario);

  LpSolution maximize(const Eigen::VectorXd& objective);
  const LpStandardForm& problem() const { return lp_; }
  int pivots_total() const { return pivots_total_; }

 private:
  LpStandardForm lp_;
  std::vector<int> last_basis_;
  int pivots_total_ = 0;
};

/// Frank-Wolfe variant: starts at 0, moves by gamma_k = min(delta, 1 - tau)
/// toward the LP maximizer of the estimated gradient until tau reaches 1.
SolveTrajectory frank_wolfe(const Scenario& scenario,
                            const SolverParams& params);

/// Projected gradient ascent with the same gradient estimator; projections
/// are approximate (conditional gradient on the squared distance).
SolveTrajectory pga(const Scenario& scenario, const SolverParams& params);

struct ProjectionResult {
  RateVector point;
  double gap = 0.0;  // Frank-Wolfe duality gap on the squared distance
  int iterations = 0;
};

ProjectionResult project_onto_polytope(const RateVector& point,
                                       const Scenario& scenario, int iters,
                                       PolytopeOracle& oracle);
ProjectionResult project_onto_polytope(const RateVector& point,
                                       const Scenario& scenario, int iters);

/// Single LP maximizing aggregate learner traffic.
SolveTrajectory max_sum(const Scenario& scenario);

/// Frank-Wolfe on the alpha-fair utility of aggregate learner traffic.
SolveTrajectory max_alpha(const Scenario& scenario,
                          const SolverParams& params);

}  // namespace ednet
