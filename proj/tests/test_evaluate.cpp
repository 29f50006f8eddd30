#include <doctest.h>

#include <cmath>

#include "ednet/evaluate.hpp"
#include "scenario_fixtures.hpp"

using namespace ednet;

TEST_CASE("simulate_arrivals basics") {
  Scenario sc = fixtures::line_scenario(10.0, 5.0, 2);
  // zero rates: all datasets empty
  auto empty = simulate_arrivals(RateVector::zero(sc.rate_index()), sc, 1);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].rows.empty());

  // expected row count per (l, x) is lambda * T
  RateVector rates = RateVector::zero(sc.rate_index());
  rates.learner_rate(0, 0) = 2.0;
  rates.learner_rate(0, 1) = 0.5;
  const int reps = 10000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r)
    total += static_cast<double>(simulate_arrivals(rates, sc, r)[0].rows.size());
  const double mean = total / reps;
  const double expect = 2.5;  // (2.0 + 0.5) * T
  CHECK(std::abs(mean - expect) < 4.0 * std::sqrt(expect / reps));
}

TEST_CASE("labels are exact in the noiseless limit") {
  Scenario sc = fixtures::line_scenario(10.0, 5.0, 2);
  sc.pool.features.resize(2, 2);
  sc.pool.features << 1.0, 0.3, 0.0, 0.9;
  sc.types[0].beta = Eigen::VectorXd::Zero(2);
  sc.types[0].beta << 0.7, -0.2;
  sc.types[0].noise_std = 1e-12;
  sc.types[0].prior_diag = Eigen::VectorXd::Constant(2, 1.0);
  sc.learners[0].design.prior_precision = Eigen::MatrixXd::Identity(2, 2);
  sc.learners[0].design.prior_mean = Eigen::VectorXd::Zero(2);
  sc.learners[0].design.noise_std = 1e-12;
  sc.validate();

  RateVector rates = RateVector::zero(sc.rate_index());
  rates.learner_rate(0, 0) = 3.0;
  rates.learner_rate(0, 1) = 3.0;
  for (const auto& [x, y] : simulate_arrivals(rates, sc, 3)[0].rows) {
    const double expect = sc.pool.features.col(x).dot(sc.types[0].beta);
    CHECK(std::abs(y - expect) < 1e-9);
  }
}

TEST_CASE("map_estimate closed form") {
  FeaturePool pool;
  pool.features = Eigen::MatrixXd::Constant(1, 1, 1.0);
  LearnerDesign design;
  design.prior_precision = Eigen::MatrixXd::Identity(1, 1);
  design.prior_mean = Eigen::VectorXd::Zero(1);
  design.noise_std = 1.0;

  // empty dataset returns the prior mean exactly
  LearnerDataset empty;
  CHECK(map_estimate(empty, pool, design) == design.prior_mean);

  // single label y=1: beta_hat = 0.5
  LearnerDataset one;
  one.rows = {{0, 1.0}};
  CHECK(map_estimate(one, pool, design)[0] == doctest::Approx(0.5));

  LearnerDataset bad;
  bad.rows = {{4, 1.0}};
  CHECK_THROWS_AS(map_estimate(bad, pool, design), UnknownFeature);
}

TEST_CASE("map_estimate recovers beta from many noiseless rows") {
  Rng rng(2718);
  FeaturePool pool;
  pool.features = Eigen::MatrixXd(2, 2);
  pool.features << 1.0, 0.2, 0.0, 1.0;
  LearnerDesign design;
  design.prior_precision = Eigen::MatrixXd::Identity(2, 2);
  design.prior_mean = Eigen::VectorXd::Zero(2);
  design.noise_std = 1e-6;
  Eigen::VectorXd beta(2);
  beta << 1.3, -0.4;

  LearnerDataset ds;
  for (int i = 0; i < 100000; ++i) {
    const int x = static_cast<int>(rng.next_u64() % 2);
    ds.rows.emplace_back(x, pool.features.col(x).dot(beta));
  }
  CHECK((map_estimate(ds, pool, design) - beta).norm() < 1e-3);
}

TEST_CASE("estimation_error_report at zero rates matches the prior draw") {
  Scenario sc = fixtures::line_scenario(10.0, 5.0);
  sc.types[0].prior_diag = Eigen::VectorXd::Constant(1, 2.0);
  sc.learners[0].design.prior_precision = Eigen::MatrixXd::Constant(1, 1, 0.5);
  sc.validate();

  EvalReport rep = estimation_error_report(
      RateVector::zero(sc.rate_index()), sc, 20000, 5, false, 10);
  // beta_hat = 0; error norm is |beta| with beta ~ N(0, 2):
  // E|beta| = sqrt(2 * 2 / pi)
  const double expect = std::sqrt(2.0 * 2.0 / M_PI);
  CHECK(std::abs(rep.mean_error[0] - expect) < 4.0 * rep.error_se[0]);
  CHECK(rep.utility.value == 0.0);
}

TEST_CASE("reports are reproducible and flag infeasible inputs") {
  Scenario sc = fixtures::line_scenario(2.0, 5.0);
  RateVector bad = RateVector::zero(sc.rate_index());
  bad.learner_rate(0, 0) = 1.0;  // learner equality broken (no edge flow)
  EvalReport a = estimation_error_report(bad, sc, 50, 9, false, 10);
  EvalReport b = estimation_error_report(bad, sc, 50, 9, false, 10);
  CHECK(a.infeasible_input);
  CHECK(a.max_violation == doctest::Approx(1.0));
  CHECK(a.mean_error == b.mean_error);
  CHECK(a.utility.value == b.utility.value);
}

TEST_CASE("error decreases as rates scale up") {
  Scenario sc = fixtures::line_scenario(20.0, 30.0, 2, 1, 1.0);
  sc.pool.features.resize(2, 2);
  sc.pool.features << 1.0, 0.1, 0.0, 1.0;
  sc.types[0].beta = Eigen::VectorXd::Zero(2);
  sc.types[0].prior_diag = Eigen::VectorXd::Constant(2, 1.5);
  sc.learners[0].design.prior_precision =
      Eigen::MatrixXd::Identity(2, 2) / 1.5;
  sc.learners[0].design.prior_mean = Eigen::VectorXd::Zero(2);
  sc.validate();

  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, 2.0, 4.0}) {
    RateVector r = RateVector::zero(sc.rate_index());
    r.edge_rate(0, 0, 0) = 2.0 * scale;
    r.edge_rate(0, 1, 0) = 2.0 * scale;
    r.learner_rate(0, 0) = 2.0 * scale;
    r.learner_rate(0, 1) = 2.0 * scale;
    EvalReport rep = estimation_error_report(r, sc, 4000, 31, false, 10);
    CHECK(rep.mean_error_avg < prev + 3.0 * rep.error_se_avg);
    prev = rep.mean_error_avg;
  }
}

TEST_CASE("fixed_beta evaluates against the scenario's stored models") {
  Scenario sc = fixtures::line_scenario(10.0, 5.0);
  sc.types[0].beta[0] = 3.0;  // far from the prior mean
  sc.validate();
  EvalReport fixed = estimation_error_report(
      RateVector::zero(sc.rate_index()), sc, 200, 4, true, 10);
  // beta_hat = prior mean = 0, so every realization has error exactly 3.
  CHECK(fixed.mean_error[0] == doctest::Approx(3.0));
  CHECK(fixed.error_se[0] == doctest::Approx(0.0));
}

TEST_CASE("empirical MAP error covariance matches the closed form") {
  // d = 2, fixed arrival counts; cov(beta_hat - beta) should equal
  // (X^T X / sigma^2 + prior_precision)^{-1}.
  FeaturePool pool;
  pool.features = Eigen::MatrixXd(2, 2);
  pool.features << 1.0, 0.4, 0.2, 1.0;
  LearnerDesign design;
  design.prior_precision = Eigen::MatrixXd::Identity(2, 2) * 0.8;
  design.prior_mean = Eigen::VectorXd::Zero(2);
  design.noise_std = 0.9;

  const Eigen::Vector2i counts(3, 2);
  Eigen::MatrixXd info = design.prior_precision;
  for (int x = 0; x < 2; ++x)
    info += counts[x] / (design.noise_std * design.noise_std) *
            pool.features.col(x) * pool.features.col(x).transpose();
  const Eigen::MatrixXd expected = info.inverse();

  Rng rng(120);
  const int reps = 100000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
  Eigen::Vector2d mean_acc = Eigen::Vector2d::Zero();
  std::vector<Eigen::Vector2d> diffs;
  diffs.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    Eigen::VectorXd beta(2);
    Eigen::LLT<Eigen::MatrixXd> llt(design.prior_precision.inverse());
    Eigen::Vector2d z(rng.normal(), rng.normal());
    beta = llt.matrixL() * z;  // beta ~ N(0, prior covariance)
    LearnerDataset ds;
    for (int x = 0; x < 2; ++x)
      for (int i = 0; i < counts[x]; ++i)
        ds.rows.emplace_back(
            x, pool.features.col(x).dot(beta) + design.noise_std * rng.normal());
    const Eigen::VectorXd beta_hat = map_estimate(ds, pool, design);
    diffs.emplace_back(beta_hat - beta);
    mean_acc += diffs.back();
  }
  mean_acc /= reps;
  for (const auto& d : diffs) acc += (d - mean_acc) * (d - mean_acc).transpose();
  acc /= (reps - 1);
  const double rel = (acc - expected).norm() / expected.norm();
  CHECK(rel < 0.05);
}
