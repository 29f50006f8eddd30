#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "ednet/lp.hpp"
#include "ednet/rng.hpp"
#include "ednet/scenario.hpp"
#include "scenario_fixtures.hpp"

using namespace ednet;

namespace {

LpStandardForm dense_lp(const Eigen::MatrixXd& a_ub,
                        const Eigen::VectorXd& b_ub,
                        const Eigen::MatrixXd& a_eq,
                        const Eigen::VectorXd& b_eq,
                        const Eigen::VectorXd& c) {
  LpStandardForm lp;
  lp.objective = c;
  lp.ineq_matrix = a_ub.sparseView();
  lp.ineq_rhs = b_ub;
  lp.eq_matrix = a_eq.sparseView();
  lp.eq_rhs = b_eq;
  if (a_ub.rows() == 0) lp.ineq_matrix.resize(0, c.size());
  if (a_eq.rows() == 0) lp.eq_matrix.resize(0, c.size());
  return lp;
}

// Brute force: enumerate candidate vertices as solutions of n active
// constraints drawn from {ub rows, eq rows, x_i = 0}; keep feasible ones.
std::optional<double> brute_force_max(const Eigen::MatrixXd& a_ub,
                                      const Eigen::VectorXd& b_ub,
                                      const Eigen::MatrixXd& a_eq,
                                      const Eigen::VectorXd& b_eq,
                                      const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  const int m_ub = static_cast<int>(a_ub.rows());
  const int m_eq = static_cast<int>(a_eq.rows());
  const int total = m_ub + m_eq + n;  // rows then nonnegativity constraints
  std::optional<double> best;

  std::vector<int> pick(n);
  // iterate over all n-subsets of [0, total)
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  auto advance = [&]() {
    int i = n - 1;
    while (i >= 0 && idx[i] == total - n + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd sys(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      const int k = idx[r];
      if (k < m_ub) {
        sys.row(r) = a_ub.row(k);
        rhs[r] = b_ub[k];
      } else if (k < m_ub + m_eq) {
        sys.row(r) = a_eq.row(k - m_ub);
        rhs[r] = b_eq[k - m_ub];
      } else {
        sys.row(r).setZero();
        sys(r, k - m_ub - m_eq) = 1.0;
        rhs[r] = 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd x = lu.solve(rhs);
    const double tol = 1e-8;
    if ((x.array() < -tol).any()) continue;
    if (m_ub > 0 && ((a_ub * x - b_ub).array() > tol).any()) continue;
    if (m_eq > 0 && (a_eq * x - b_eq).cwiseAbs().maxCoeff() > tol) continue;
    const double val = c.dot(x);
    if (!best || val > *best) best = val;
  } while (advance());
  return best;
}

}  // namespace

TEST_CASE("single-variable LP") {
  Eigen::MatrixXd a(1, 1);
  a << 1;
  Eigen::VectorXd b(1);
  b << 10;
  Eigen::VectorXd c(1);
  c << 1;
  LpSolution sol = solve_lp(
      dense_lp(a, b, Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), c));
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(sol.point[0] == doctest::Approx(10.0));
}

TEST_CASE("zero objective returns a feasible vertex") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 0;
  Eigen::VectorXd b(2);
  b << 4, 3;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  LpSolution sol = solve_lp(
      dense_lp(a, b, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), c));
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(0.0));
  CHECK((sol.point.array() >= -1e-9).all());
}

TEST_CASE("unbounded and infeasible detection") {
  // max x, no rows at all
  LpStandardForm lp;
  lp.objective = Eigen::VectorXd::Constant(1, 1.0);
  lp.ineq_matrix.resize(0, 1);
  lp.ineq_rhs = Eigen::VectorXd(0);
  lp.eq_matrix.resize(0, 1);
  lp.eq_rhs = Eigen::VectorXd(0);
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);

  // x1 + x2 = -1 with x >= 0 is infeasible
  Eigen::MatrixXd aeq(1, 2);
  aeq << 1, 1;
  Eigen::VectorXd beq(1);
  beq << -1;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  CHECK(solve_lp(dense_lp(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), aeq, beq,
                          c))
            .status == LpStatus::Infeasible);
}

TEST_CASE("two-feature single-edge network LP sends capacity to the better feature") {
  Scenario sc = fixtures::line_scenario(10.0, 100.0, 2);
  LpStandardForm lp = constraint_matrices(sc);
  const RateIndex idx = sc.rate_index();
  lp.objective[idx.learner_var(0, 0)] = 3.0;
  lp.objective[idx.learner_var(0, 1)] = 1.0;
  LpSolution sol = solve_lp(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(sol.point[idx.learner_var(0, 0)] == doctest::Approx(10.0));
  CHECK(sol.point[idx.learner_var(0, 1)] == doctest::Approx(0.0));
}

TEST_CASE("LP solutions pass feasibility_check over D") {
  ScenarioConfig cfg;
  cfg.kind = TopologyKind::ErdosRenyi;
  cfg.topology.nodes = 15;
  cfg.topology.edge_prob = 0.3;
  cfg.num_sources = 3;
  cfg.num_learners = 2;
  cfg.num_features = 2;
  cfg.feature_dim = 2;
  cfg.num_types = 2;
  for (std::uint64_t seed : {5ULL, 6ULL, 7ULL}) {
    cfg.seed = seed;
    Scenario sc = build_scenario(cfg);
    LpStandardForm lp = constraint_matrices(sc);
    Rng rng(seed);
    for (int trial = 0; trial < 5; ++trial) {
      for (int i = 0; i < lp.objective.size(); ++i)
        lp.objective[i] = rng.uniform(-1.0, 2.0);
      LpSolution sol = solve_lp(lp);
      REQUIRE(sol.status == LpStatus::Optimal);
      RateVector rates{sc.rate_index(), sol.point};
      CHECK(feasibility_check(rates, sc, 1e-6).empty());
    }
  }
}

TEST_CASE("random small LPs match brute-force vertex enumeration") {
  Rng rng(314159);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);  // up to 4 vars
    const int m = 1 + static_cast<int>(rng.next_u64() % 4);  // random rows
    Eigen::MatrixXd a_ub(m + n, n);
    Eigen::VectorXd b_ub(m + n);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n; ++j) a_ub(r, j) = rng.uniform(-1.0, 1.0);
      b_ub[r] = rng.uniform(0.1, 2.0);  // 0 feasible
    }
    // box rows keep everything bounded
    for (int j = 0; j < n; ++j) {
      a_ub.row(m + j).setZero();
      a_ub(m + j, j) = 1.0;
      b_ub[m + j] = rng.uniform(0.5, 3.0);
    }

    // optional equality row through a feasible point
    Eigen::MatrixXd a_eq(0, n);
    Eigen::VectorXd b_eq(0);
    if (trial % 3 == 0 && n >= 2) {
      Eigen::VectorXd x0(n);
      for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, 0.2);
      a_eq.resize(1, n);
      for (int j = 0; j < n; ++j) a_eq(0, j) = rng.uniform(-1.0, 1.0);
      b_eq.resize(1);
      b_eq[0] = a_eq.row(0).dot(x0);
    }

    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c[j] = rng.uniform(-1.0, 1.0);

    auto expected = brute_force_max(a_ub, b_ub, a_eq, b_eq, c);
    LpSolution sol = solve_lp(dense_lp(a_ub, b_ub, a_eq, b_eq, c));
    if (!expected.has_value()) {
      CHECK(sol.status != LpStatus::Optimal);
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(std::abs(sol.objective_value - *expected) < 1e-6);
    ++solved;
  }
  CHECK(solved > 100);
}

TEST_CASE("weak duality certificate at the optimum") {
  Rng rng(271828);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const int m = 2 + static_cast<int>(rng.next_u64() % 3);
    Eigen::MatrixXd a(m + n, n);
    Eigen::VectorXd b(m + n);
    for (int r = 0; r < m; ++r) {
      for (int j = 0; j < n; ++j) a(r, j) = rng.uniform(-0.5, 1.0);
      b[r] = rng.uniform(0.2, 2.0);
    }
    for (int j = 0; j < n; ++j) {
      a.row(m + j).setZero();
      a(m + j, j) = 1.0;
      b[m + j] = 2.0;
    }
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c[j] = rng.uniform(-0.5, 1.0);
    LpStandardForm lp =
        dense_lp(a, b, Eigen::MatrixXd(0, n), Eigen::VectorXd(0), c);
    LpSolution sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    // y >= 0, A^T y >= c, and b^T y bounds (here: equals) the optimum.
    REQUIRE(sol.dual.size() == a.rows());
    CHECK((sol.dual.array() >= -1e-9).all());
    Eigen::VectorXd slack = a.transpose() * sol.dual - c;
    CHECK((slack.array() >= -1e-8).all());
    CHECK(b.dot(sol.dual) >= sol.objective_value - 1e-6);
    CHECK(std::abs(b.dot(sol.dual) - sol.objective_value) < 1e-6);
  }
}

TEST_CASE("warm start reproduces the cold answer") {
  Scenario sc = fixtures::line_scenario(10.0, 100.0, 3, 2);
  LpStandardForm lp = constraint_matrices(sc);
  const RateIndex idx = sc.rate_index();
  for (int x = 0; x < 3; ++x) lp.objective[idx.learner_var(0, x)] = 1.0 + x;
  LpSolution cold = solve_lp(lp);
  REQUIRE(cold.status == LpStatus::Optimal);

  lp.objective[idx.learner_var(0, 0)] = 5.0;  // new objective, same rows
  LpSolution warm = solve_lp(lp, cold.basis);
  LpSolution cold2 = solve_lp(lp);
  REQUIRE(warm.status == LpStatus::Optimal);
  CHECK(warm.objective_value ==
        doctest::Approx(cold2.objective_value).epsilon(1e-9));

  // stale basis falls back to a cold start
  std::vector<int> junk = {0};
  LpSolution fallback = solve_lp(lp, junk);
  CHECK(fallback.objective_value ==
        doctest::Approx(cold2.objective_value).epsilon(1e-9));
}

TEST_CASE("deterministic pivoting") {
  Scenario sc = fixtures::line_scenario(10.0, 100.0, 2, 2);
  LpStandardForm lp = constraint_matrices(sc);
  lp.objective.setConstant(1.0);
  LpSolution a = solve_lp(lp);
  LpSolution b = solve_lp(lp);
  CHECK(a.point == b.point);
  CHECK(a.pivots == b.pivots);
}
