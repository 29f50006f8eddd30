#include <doctest.h>

#include <cmath>

#include "ednet/solvers.hpp"
#include "ednet/topology.hpp"
#include "scenario_fixtures.hpp"

using namespace ednet;

namespace {

// Neumaier-compensated sum; the step fractions must add to exactly 1 under
// compensated accumulation.
double compensated_sum(const std::vector<IterateRecord>& iterates) {
  double sum = 0.0, comp = 0.0;
  for (const IterateRecord& it : iterates) {
    const double t = sum + it.step;
    if (std::abs(sum) >= std::abs(it.step))
      comp += (sum - t) + it.step;
    else
      comp += (it.step - t) + sum;
    sum = t;
  }
  return sum + comp;
}

SolverParams quick_params(std::uint64_t seed, double delta = 0.1) {
  SolverParams p;
  p.delta = delta;
  p.seed = seed;
  p.estimator.sample_count = 10;
  p.trajectory_utility_samples = 0;  // keep unit tests fast
  return p;
}

Scenario bottleneck_two_learners(double capacity) {
  // source 0 -> relay 1 -> learners {2, 3}; edge (0,1) is the bottleneck.
  Scenario sc = fixtures::line_scenario(capacity, 100.0);
  sc.network = Network{};
  sc.network.node_count = 4;
  sc.network.edges = {Edge{0, 1, capacity}, Edge{1, 2, 10 * capacity},
                      Edge{1, 3, 10 * capacity}};
  sc.network.sources = {0};
  sc.network.learners = {2, 3};
  sc.network.finalize();
  LearnerSpec a = sc.learners[0];
  a.node = 2;
  LearnerSpec b = a;
  b.node = 3;
  sc.learners = {a, b};
  sc.validate();
  return sc;
}

}  // namespace

TEST_CASE("frank_wolfe saturates the single edge") {
  Scenario sc = fixtures::line_scenario(7.5, 100.0);
  SolveTrajectory traj = frank_wolfe(sc, quick_params(3));
  CHECK(traj.final.learner_rate(0, 0) == doctest::Approx(7.5).epsilon(1e-9));
  CHECK(traj.final.edge_rate(0, 0, 0) == doctest::Approx(7.5).epsilon(1e-9));
  CHECK(feasibility_check(traj.final, sc, 1e-6).empty());
}

TEST_CASE("frank_wolfe step schedule") {
  Scenario sc = fixtures::line_scenario(5.0, 100.0);
  SolveTrajectory traj = frank_wolfe(sc, quick_params(1, 0.3));
  REQUIRE(traj.iterates.size() == 4);
  CHECK(traj.iterates[0].step == doctest::Approx(0.3));
  CHECK(traj.iterates[1].step == doctest::Approx(0.3));
  CHECK(traj.iterates[2].step == doctest::Approx(0.3));
  CHECK(traj.iterates[3].step == doctest::Approx(0.1));
  CHECK(traj.iterates[3].tau == 1.0);
  CHECK(compensated_sum(traj.iterates) == 1.0);

  SolveTrajectory fine = frank_wolfe(sc, quick_params(1, 0.01));
  CHECK(fine.iterates.size() == 100);
  CHECK(compensated_sum(fine.iterates) == 1.0);
  CHECK(fine.iterates.back().tau == 1.0);
}

TEST_CASE("frank_wolfe with the exact oracle is deterministic") {
  Scenario sc = fixtures::line_scenario(2.0, 100.0, 2);
  SolverParams p = quick_params(9, 0.05);
  p.gradient_mode = GradientMode::ExactSeries;
  SolveTrajectory a = frank_wolfe(sc, p);
  SolveTrajectory b = frank_wolfe(sc, p);
  CHECK(a.final.values == b.final.values);
}

TEST_CASE("projection returns feasible points near feasible inputs") {
  Scenario sc = fixtures::line_scenario(4.0, 100.0);
  // feasible interior-ish point
  RateVector p = RateVector::zero(sc.rate_index());
  p.edge_rate(0, 0, 0) = 2.0;
  p.learner_rate(0, 0) = 2.0;
  ProjectionResult res = project_onto_polytope(p, sc, 200);
  CHECK((res.point.values - p.values).norm() < 1e-6);
  CHECK(feasibility_check(res.point, sc, 1e-6).empty());

  // 1-D style: push the learner rate to 2C; projection clips toward C
  RateVector q = RateVector::zero(sc.rate_index());
  q.edge_rate(0, 0, 0) = 8.0;
  q.learner_rate(0, 0) = 8.0;
  ProjectionResult clip = project_onto_polytope(q, sc, 400);
  CHECK(clip.point.learner_rate(0, 0) == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(feasibility_check(clip.point, sc, 1e-6).empty());
}

TEST_CASE("projection gap shrinks under exact line search") {
  Scenario sc = fixtures::line_scenario(3.0, 100.0, 2);
  RateVector q = RateVector::zero(sc.rate_index());
  q.learner_rate(0, 0) = 5.0;
  q.learner_rate(0, 1) = 1.0;
  PolytopeOracle oracle(sc);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int iters = 1; iters <= 40; iters += 6) {
    ProjectionResult res = project_onto_polytope(q, sc, iters, oracle);
    CHECK(res.gap <= prev_gap + 1e-12);
    prev_gap = res.gap;
  }
}

TEST_CASE("pga stays at zero with no learners") {
  Scenario sc = fixtures::line_scenario(5.0, 10.0);
  sc.network.learners.clear();
  sc.network.finalize();
  sc.learners.clear();
  sc.validate();
  SolverParams p = quick_params(4);
  p.pga.iterations = 3;
  p.pga.projection_iterations = 5;
  SolveTrajectory traj = pga(sc, p);
  CHECK(traj.final.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pga converges on the single edge") {
  Scenario sc = fixtures::line_scenario(6.0, 100.0);
  SolverParams p = quick_params(11);
  p.estimator.sample_count = 20;
  p.pga.iterations = 120;
  p.pga.projection_iterations = 30;
  SolveTrajectory traj = pga(sc, p);
  CHECK(traj.final.learner_rate(0, 0) == doctest::Approx(6.0).epsilon(1e-2));
  for (const IterateRecord& it : traj.iterates)
    CHECK(feasibility_check(it.rates, sc, 1e-6).empty());
  CHECK(feasibility_check(traj.final, sc, 1e-6).empty());
}

TEST_CASE("max_sum matches the lambda_max diagnostic") {
  Scenario sc = fixtures::line_scenario(9.0, 100.0, 2, 2);
  SolveTrajectory traj = max_sum(sc);
  TheoryConstants tc = compute_theory_constants(sc);
  CHECK(traj.iterates[0].lp_value == doctest::Approx(tc.lambda_max));
  double aggregate = 0.0;
  for (int x = 0; x < 2; ++x) aggregate += traj.final.learner_rate(0, x);
  CHECK(aggregate == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(feasibility_check(traj.final, sc, 1e-6).empty());
}

TEST_CASE("max_alpha splits a shared bottleneck evenly") {
  Scenario sc = bottleneck_two_learners(1.0);
  SolverParams p = quick_params(2, 0.01);
  SolveTrajectory traj = max_alpha(sc, p);
  CHECK(traj.final.learner_rate(0, 0) == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(traj.final.learner_rate(1, 0) == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(feasibility_check(traj.final, sc, 1e-6).empty());

  // alpha-fair objective never exceeds the all-at-lambda-max bound
  TheoryConstants tc = compute_theory_constants(sc);
  const double bound = 2.0 *
                       std::pow(tc.lambda_max + p.alpha_floor, 1.0 - p.alpha) /
                       (1.0 - p.alpha);
  CHECK(traj.iterates.back().utility_estimate <= bound + 1e-9);
}

TEST_CASE("max_alpha with one learner attains the max_sum aggregate") {
  Scenario sc = fixtures::line_scenario(3.0, 100.0, 2);
  SolverParams p = quick_params(6, 0.02);
  SolveTrajectory fair = max_alpha(sc, p);
  double aggregate = 0.0;
  for (int x = 0; x < 2; ++x) aggregate += fair.final.learner_rate(0, x);
  CHECK(aggregate == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_THROWS_AS(max_alpha(sc, [] {
                    SolverParams bad;
                    bad.alpha = 1.0;
                    return bad;
                  }()),
                  InvalidParams);
}

TEST_CASE("all solvers emit feasible iterates on a random scenario") {
  ScenarioConfig cfg;
  cfg.kind = TopologyKind::ErdosRenyi;
  cfg.topology.nodes = 12;
  cfg.topology.edge_prob = 0.35;
  cfg.num_sources = 2;
  cfg.num_learners = 2;
  cfg.num_features = 2;
  cfg.feature_dim = 2;
  cfg.num_types = 1;
  cfg.seed = 77;
  Scenario sc = build_scenario(cfg);

  SolverParams p = quick_params(8, 0.2);
  p.pga.iterations = 5;
  p.pga.projection_iterations = 15;

  for (const SolveTrajectory& traj :
       {frank_wolfe(sc, p), pga(sc, p), max_sum(sc), max_alpha(sc, p)}) {
    for (const IterateRecord& it : traj.iterates)
      CHECK(feasibility_check(it.rates, sc, 1e-6).empty());
    CHECK(feasibility_check(traj.final, sc, 1e-6).empty());
  }
}

TEST_CASE("near-optimality against grid search on one tiny instance") {
  Scenario sc = fixtures::line_scenario(1.5, 0.9, 2);  // gen rate binds
  sc.pool.features(0, 0) = 1.0;
  sc.pool.features(0, 1) = 0.8;
  sc.validate();

  // grid over the learner-rate box at resolution 0.02 * lambda_max,
  // membership via the LP with pinned learner rates
  TheoryConstants tc = compute_theory_constants(sc);
  const double step = 0.02 * tc.lambda_max;
  LpStandardForm base = constraint_matrices(sc);
  const RateIndex idx = sc.rate_index();
  double opt_grid = 0.0;
  for (double a = 0.0; a <= tc.lambda_max + 1e-12; a += step) {
    for (double b = 0.0; b <= tc.lambda_max + 1e-12; b += step) {
      LpStandardForm pinned = base;
      Eigen::SparseMatrix<double> extra(2, idx.size());
      std::vector<Eigen::Triplet<double>> t;
      t.emplace_back(0, idx.learner_var(0, 0), 1.0);
      t.emplace_back(1, idx.learner_var(0, 1), 1.0);
      extra.setFromTriplets(t.begin(), t.end());
      // append the pin rows to the equality block
      Eigen::SparseMatrix<double> eq(base.eq_matrix.rows() + 2, idx.size());
      std::vector<Eigen::Triplet<double>> all;
      for (int k = 0; k < base.eq_matrix.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(base.eq_matrix, k);
             it; ++it)
          all.emplace_back(static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      all.emplace_back(static_cast<int>(base.eq_matrix.rows()),
                       idx.learner_var(0, 0), 1.0);
      all.emplace_back(static_cast<int>(base.eq_matrix.rows()) + 1,
                       idx.learner_var(0, 1), 1.0);
      eq.setFromTriplets(all.begin(), all.end());
      pinned.eq_matrix = eq;
      pinned.eq_rhs.resize(base.eq_rhs.size() + 2);
      pinned.eq_rhs.head(base.eq_rhs.size()) = base.eq_rhs;
      pinned.eq_rhs[base.eq_rhs.size()] = a;
      pinned.eq_rhs[base.eq_rhs.size() + 1] = b;
      if (solve_lp(pinned).status != LpStatus::Optimal) continue;
      RateVector point = RateVector::zero(idx);
      point.learner_rate(0, 0) = a;
      point.learner_rate(0, 1) = b;
      opt_grid = std::max(opt_grid, exact_utility_small(point, sc, 1e-10));
    }
  }

  SolverParams p = quick_params(5, 0.01);
  p.gradient_mode = GradientMode::ExactSeries;
  SolveTrajectory traj = frank_wolfe(sc, p);
  const double achieved = exact_utility_small(traj.final, sc, 1e-10);
  CHECK(achieved >= (1.0 - std::exp(-1.0)) * opt_grid - 0.02 * opt_grid);
}
