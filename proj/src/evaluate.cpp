#include "ednet/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace ednet {

namespace {

constexpr std::uint64_t kTagArrivals = 0x41;
constexpr std::uint64_t kTagRealization = 0x52;
constexpr std::uint64_t kTagEvalUtility = 0x5545;

LearnerDataset draw_dataset(const RateVector& rates, const Scenario& scenario,
                            int learner_pos,
                            const std::vector<Eigen::VectorXd>& betas,
                            Rng& rng) {
  const LearnerSpec& spec = scenario.learners[learner_pos];
  const Eigen::VectorXd& beta = betas[spec.target_type];
  const double sigma = scenario.types[spec.target_type].noise_std;
  LearnerDataset ds;
  ds.learner_node = spec.node;
  for (int x = 0; x < scenario.pool.size(); ++x) {
    const double mean =
        std::max(rates.learner_rate(learner_pos, x), 0.0) * scenario.horizon;
    const std::int64_t count = rng.poisson(mean);
    const double signal = scenario.pool.features.col(x).dot(beta);
    for (std::int64_t i = 0; i < count; ++i)
      ds.rows.emplace_back(x, signal + sigma * rng.normal());
  }
  return ds;
}

std::vector<Eigen::VectorXd> scenario_betas(const Scenario& scenario) {
  std::vector<Eigen::VectorXd> betas;
  betas.reserve(scenario.types.size());
  for (const TypeModel& t : scenario.types) betas.push_back(t.beta);
  return betas;
}

}  // namespace

std::vector<LearnerDataset> simulate_arrivals(const RateVector& rates,
                                              const Scenario& scenario,
                                              std::uint64_t seed) {
  if (!(rates.index == scenario.rate_index()))
    throw IndexMismatch("simulate_arrivals: rate vector shape mismatch");
  const std::vector<Eigen::VectorXd> betas = scenario_betas(scenario);
  std::vector<LearnerDataset> out;
  out.reserve(scenario.learners.size());
  for (int l = 0; l < static_cast<int>(scenario.learners.size()); ++l) {
    Rng rng(derive_seed({seed, kTagArrivals, static_cast<std::uint64_t>(l)}));
    out.push_back(draw_dataset(rates, scenario, l, betas, rng));
  }
  return out;
}

Eigen::VectorXd map_estimate(const LearnerDataset& dataset,
                             const FeaturePool& pool,
                             const LearnerDesign& design) {
  design.validate();
  if (pool.dimension() != design.dimension())
    throw DimensionMismatch("map_estimate: pool/design dimension mismatch");
  if (dataset.rows.empty()) return design.prior_mean;

  const double sigma2 = design.noise_std * design.noise_std;
  Eigen::MatrixXd normal = sigma2 * design.prior_precision;
  Eigen::VectorXd rhs = sigma2 * (design.prior_precision * design.prior_mean);
  for (const auto& [feature, label] : dataset.rows) {
    if (feature < 0 || feature >= pool.size())
      throw UnknownFeature("map_estimate: dataset references unknown feature");
    const auto x = pool.features.col(feature);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0);
    rhs += x * label;
  }
  normal.triangularView<Eigen::StrictlyUpper>() =
      normal.transpose().triangularView<Eigen::StrictlyUpper>();
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("map_estimate: normal equations not PD");
  return llt.solve(rhs);
}

EvalReport estimation_error_report(const RateVector& rates,
                                   const Scenario& scenario, int realizations,
                                   std::uint64_t seed, bool fixed_beta,
                                   int utility_samples) {
  if (realizations < 1) throw InvalidParams("realizations must be >= 1");
  if (!(rates.index == scenario.rate_index()))
    throw IndexMismatch("estimation_error_report: rate shape mismatch");

  EvalReport report;
  report.realizations = realizations;
  report.seed = seed;
  report.fixed_beta = fixed_beta;

  // Infeasible inputs are evaluated as-given but flagged loudly.
  const auto violations = feasibility_check(rates, scenario, 1e-6);
  report.infeasible_input = !violations.empty();
  for (const Violation& v : violations)
    report.max_violation = std::max(report.max_violation, v.magnitude);

  const int n_learners = static_cast<int>(scenario.learners.size());
  const std::vector<Eigen::VectorXd> fixed = scenario_betas(scenario);
  std::vector<std::vector<double>> errors(
      n_learners, std::vector<double>(realizations, 0.0));

  for (int r = 0; r < realizations; ++r) {
    Rng rng(derive_seed({seed, kTagRealization, static_cast<std::uint64_t>(r)}));
    std::vector<Eigen::VectorXd> betas;
    if (fixed_beta) {
      betas = fixed;
    } else {
      betas.reserve(scenario.types.size());
      for (const TypeModel& t : scenario.types) {
        Eigen::VectorXd beta(t.prior_diag.size());
        for (int i = 0; i < beta.size(); ++i)
          beta[i] = rng.normal(0.0, std::sqrt(t.prior_diag[i]));
        betas.push_back(std::move(beta));
      }
    }
    for (int l = 0; l < n_learners; ++l) {
      const LearnerDataset ds = draw_dataset(rates, scenario, l, betas, rng);
      const Eigen::VectorXd beta_hat =
          map_estimate(ds, scenario.pool, scenario.learners[l].design);
      errors[l][r] =
          (beta_hat - betas[scenario.learners[l].target_type]).norm();
    }
  }

  report.mean_error.resize(n_learners);
  report.error_se.resize(n_learners);
  double avg = 0.0, se_sq = 0.0;
  for (int l = 0; l < n_learners; ++l) {
    const double mean =
        pairwise_sum(errors[l]) / static_cast<double>(realizations);
    double var = 0.0;
    if (realizations > 1) {
      std::vector<double> sq(realizations);
      for (int r = 0; r < realizations; ++r) {
        const double d = errors[l][r] - mean;
        sq[r] = d * d;
      }
      var = pairwise_sum(sq) / static_cast<double>(realizations - 1);
    }
    report.mean_error[l] = mean;
    report.error_se[l] = std::sqrt(var / static_cast<double>(realizations));
    avg += mean;
    se_sq += report.error_se[l] * report.error_se[l];
  }
  report.mean_error_avg = n_learners > 0 ? avg / n_learners : 0.0;
  report.error_se_avg = n_learners > 0 ? std::sqrt(se_sq) / n_learners : 0.0;

  EstimatorParams up;
  up.utility_samples = utility_samples;
  report.utility = estimate_utility(rates, scenario, up,
                                    derive_seed({seed, kTagEvalUtility}));
  return report;
}

}  // namespace ednet
