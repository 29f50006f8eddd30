#include "ednet/solvers.hpp"

#include <algorithm>
#include <cmath>

namespace ednet {

namespace {

constexpr std::uint64_t kTagFwGradient = 0x4657;
constexpr std::uint64_t kTagPgaGradient = 0x5047;
constexpr std::uint64_t kTagTrajectoryUtility = 0x5455;

int step_count(double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw InvalidParams("delta must lie in (0, 1]");
  return static_cast<int>(std::ceil(1.0 / delta));
}

struct GradientInfo {
  Eigen::VectorXd lp_objective;
  double inf_norm = 0.0;
};

GradientInfo gradient_at(const RateVector& rates, const Scenario& scenario,
                         const SolverParams& params, std::uint64_t tag,
                         int iteration) {
  GradientInfo info;
  const RateIndex idx = scenario.rate_index();
  if (params.gradient_mode == GradientMode::Estimated) {
    GradientEstimate est = estimate_gradient(
        rates, scenario, params.estimator,
        derive_seed({params.seed, tag, static_cast<std::uint64_t>(iteration)}));
    info.lp_objective = est.lp_objective(idx);
    info.inf_norm = est.inf_norm();
  } else {
    Eigen::MatrixXd grad =
        exact_gradient_small(rates, scenario, params.exact_oracle_tol);
    info.lp_objective = Eigen::VectorXd::Zero(idx.size());
    for (int l = 0; l < idx.learner_count; ++l)
      for (int x = 0; x < idx.feature_count; ++x)
        info.lp_objective[idx.learner_var(l, x)] = grad(l, x);
    info.inf_norm =
        grad.size() == 0 ? 0.0 : grad.cwiseAbs().maxCoeff();
  }
  return info;
}

void record_utility(IterateRecord& rec, const RateVector& rates,
                    const Scenario& scenario, const SolverParams& params,
                    int iteration) {
  if (params.trajectory_utility_samples <= 0) return;
  if (params.gradient_mode == GradientMode::ExactSeries) {
    rec.utility_estimate =
        exact_utility_small(rates, scenario, params.exact_oracle_tol);
    rec.utility_se = 0.0;
    return;
  }
  EstimatorParams up = params.estimator;
  up.utility_samples = params.trajectory_utility_samples;
  UtilityEstimate u = estimate_utility(
      rates, scenario, up,
      derive_seed({params.seed, kTagTrajectoryUtility,
                   static_cast<std::uint64_t>(iteration)}));
  rec.utility_estimate = u.value;
  rec.utility_se = u.std_error;
}

Eigen::VectorXd aggregate_learner_rates(const RateVector& rates) {
  Eigen::VectorXd agg = Eigen::VectorXd::Zero(rates.index.learner_count);
  for (int l = 0; l < rates.index.learner_count; ++l)
    for (int x = 0; x < rates.index.feature_count; ++x)
      agg[l] += rates.learner_rate(l, x);
  return agg;
}

}  // namespace

PolytopeOracle::PolytopeOracle(const Scenario& scenario)
    : lp_(constraint_matrices(scenario)) {}

LpSolution PolytopeOracle::maximize(const Eigen::VectorXd& objective) {
  if (objective.size() != lp_.variable_count())
    throw DimensionMismatch("oracle objective has wrong length");
  lp_.objective = objective;
  LpSolution sol = last_basis_.empty() ? solve_lp(lp_)
                                       : solve_lp(lp_, last_basis_);
  if (sol.status != LpStatus::Optimal)
    throw Error(std::string("LP oracle over D failed: ") +
                to_string(sol.status));
  last_basis_ = sol.basis;
  pivots_total_ += sol.pivots;
  return sol;
}

SolveTrajectory frank_wolfe(const Scenario& scenario,
                            const SolverParams& params) {
  scenario.validate();
  const RateIndex idx = scenario.rate_index();
  PolytopeOracle oracle(scenario);
  const int total_steps = step_count(params.delta);

  SolveTrajectory traj;
  traj.algorithm = "fw";
  RateVector rates = RateVector::zero(idx);

  for (int k = 0; k < total_steps; ++k) {
    const double tau_before = params.delta * static_cast<double>(k);
    const double gamma =
        (k == total_steps - 1)
            ? 1.0 - params.delta * static_cast<double>(total_steps - 1)
            : params.delta;

    GradientInfo grad =
        gradient_at(rates, scenario, params, kTagFwGradient, k);
    LpSolution sol = oracle.maximize(grad.lp_objective);

    IterateRecord rec;
    rec.k = k;
    rec.step = gamma;
    rec.tau = (k == total_steps - 1)
                  ? 1.0
                  : params.delta * static_cast<double>(k + 1);
    rec.rates = rates;
    rec.grad_inf_norm = grad.inf_norm;
    rec.lp_value = sol.objective_value;
    record_utility(rec, rates, scenario, params, k);
    traj.iterates.push_back(std::move(rec));

    rates.values += gamma * sol.point;
    (void)tau_before;
  }
  traj.final = std::move(rates);
  traj.lp_pivots_total = oracle.pivots_total();
  return traj;
}

ProjectionResult project_onto_polytope(const RateVector& point,
                                       const Scenario& scenario, int iters,
                                       PolytopeOracle& oracle) {
  const RateIndex idx = scenario.rate_index();
  if (!(point.index == idx))
    throw IndexMismatch("projection input shape mismatch");
  if (iters < 1) throw InvalidParams("projection needs at least 1 iteration");

  ProjectionResult result{RateVector::zero(idx), 0.0, 0};
  RateVector& v = result.point;
  constexpr double kGapTol = 5e-13;

  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXd grad = v.values - point.values;  // of 0.5 ||v - p||^2
    LpSolution sol = oracle.maximize(-grad);
    Eigen::VectorXd direction = sol.point - v.values;
    const double gap = -grad.dot(direction);
    result.gap = gap;
    result.iterations = i + 1;
    if (gap <= kGapTol) break;
    const double denom = direction.squaredNorm();
    if (denom <= 0.0) break;
    const double step = std::clamp(gap / denom, 0.0, 1.0);
    v.values += step * direction;
  }
  return result;
}

ProjectionResult project_onto_polytope(const RateVector& point,
                                       const Scenario& scenario, int iters) {
  PolytopeOracle oracle(scenario);
  return project_onto_polytope(point, scenario, iters, oracle);
}

SolveTrajectory pga(const Scenario& scenario, const SolverParams& params) {
  scenario.validate();
  const RateIndex idx = scenario.rate_index();
  if (params.pga.iterations < 1)
    throw InvalidParams("pga iterations must be >= 1");
  PolytopeOracle oracle(scenario);

  // lambda_max for the step size scale: one LP with unit learner objective.
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(idx.size());
  for (int l = 0; l < idx.learner_count; ++l)
    for (int x = 0; x < idx.feature_count; ++x)
      ones[idx.learner_var(l, x)] = 1.0;
  const double lambda_max = oracle.maximize(ones).objective_value;

  SolveTrajectory traj;
  traj.algorithm = "pga";
  RateVector rates = RateVector::zero(idx);
  double eta = 0.0;

  for (int it = 0; it < params.pga.iterations; ++it) {
    GradientInfo grad =
        gradient_at(rates, scenario, params, kTagPgaGradient, it);
    if (it == 0) {
      // Fixed step for the whole run, scaled off the initial gradient.
      eta = grad.inf_norm > 0.0
                ? params.pga.step_scale * lambda_max / grad.inf_norm
                : 0.0;
    }

    RateVector target = rates;
    target.values += eta * grad.lp_objective;
    ProjectionResult proj = project_onto_polytope(
        target, scenario, params.pga.projection_iterations, oracle);

    IterateRecord rec;
    rec.k = it;
    rec.step = eta;
    rec.tau = static_cast<double>(it + 1) /
              static_cast<double>(params.pga.iterations);
    rec.rates = rates;
    rec.grad_inf_norm = grad.inf_norm;
    rec.lp_value = proj.gap;
    record_utility(rec, rates, scenario, params, it);
    traj.iterates.push_back(std::move(rec));

    rates = std::move(proj.point);
  }
  traj.final = std::move(rates);
  traj.lp_pivots_total = oracle.pivots_total();
  return traj;
}

SolveTrajectory max_sum(const Scenario& scenario) {
  scenario.validate();
  const RateIndex idx = scenario.rate_index();
  PolytopeOracle oracle(scenario);
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(idx.size());
  for (int l = 0; l < idx.learner_count; ++l)
    for (int x = 0; x < idx.feature_count; ++x)
      obj[idx.learner_var(l, x)] = 1.0;
  LpSolution sol = oracle.maximize(obj);

  SolveTrajectory traj;
  traj.algorithm = "maxsum";
  IterateRecord rec;
  rec.k = 0;
  rec.tau = 1.0;
  rec.step = 1.0;
  rec.rates = RateVector::zero(idx);
  rec.lp_value = sol.objective_value;
  rec.utility_estimate = sol.objective_value;  // the MaxSum objective itself
  traj.iterates.push_back(std::move(rec));
  traj.final = RateVector{idx, sol.point};
  traj.lp_pivots_total = oracle.pivots_total();
  return traj;
}

SolveTrajectory max_alpha(const Scenario& scenario,
                          const SolverParams& params) {
  scenario.validate();
  if (!(params.alpha > 1.0))
    throw InvalidParams("max_alpha requires alpha > 1");
  const RateIndex idx = scenario.rate_index();
  PolytopeOracle oracle(scenario);
  const int total_steps = step_count(params.delta);
  const double floor = params.alpha_floor;

  SolveTrajectory traj;
  traj.algorithm = "maxalpha";
  RateVector rates = RateVector::zero(idx);

  auto fair_value = [&](const Eigen::VectorXd& agg) {
    double v = 0.0;
    for (int l = 0; l < agg.size(); ++l)
      v += std::pow(agg[l] + floor, 1.0 - params.alpha) / (1.0 - params.alpha);
    return v;
  };

  for (int k = 0; k < total_steps; ++k) {
    const double gamma =
        (k == total_steps - 1)
            ? 1.0 - params.delta * static_cast<double>(total_steps - 1)
            : params.delta;
    Eigen::VectorXd agg = aggregate_learner_rates(rates);
    Eigen::VectorXd obj = Eigen::VectorXd::Zero(idx.size());
    double inf_norm = 0.0;
    for (int l = 0; l < idx.learner_count; ++l) {
      const double g = std::pow(agg[l] + floor, -params.alpha);
      inf_norm = std::max(inf_norm, g);
      for (int x = 0; x < idx.feature_count; ++x)
        obj[idx.learner_var(l, x)] = g;
    }
    LpSolution sol = oracle.maximize(obj);

    IterateRecord rec;
    rec.k = k;
    rec.step = gamma;
    rec.tau = (k == total_steps - 1)
                  ? 1.0
                  : params.delta * static_cast<double>(k + 1);
    rec.rates = rates;
    rec.grad_inf_norm = inf_norm;
    rec.lp_value = sol.objective_value;
    rec.utility_estimate = fair_value(agg);  // alpha-fair objective
    traj.iterates.push_back(std::move(rec));

    rates.values += gamma * sol.point;
  }
  traj.final = std::move(rates);
  traj.lp_pivots_total = oracle.pivots_total();
  return traj;
}

}  // namespace ednet
