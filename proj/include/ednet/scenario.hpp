#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ednet/design.hpp"
#include "ednet/lp.hpp"
#include "ednet/network.hpp"
#include "ednet/topology.hpp"

namespace ednet {

/// Ground-truth linear model for one label type, plus the diagonal prior
/// variances it was generated from (needed to redraw betas in evaluation).
struct TypeModel {
  Eigen::VectorXd beta;
  double noise_std = 1.0;
  Eigen::VectorXd prior_diag;  // per-coordinate prior variances
};

struct LearnerSpec {
  int node = -1;
  int target_type = 0;
  LearnerDesign design;
};

/// A full problem instance: topology, capacities, sources with generation
/// rates, learners with priors, feature pool, type set, and horizon.
struct Scenario {
  Network network;
  FeaturePool pool;
  int type_count = 0;
  std::vector<Eigen::MatrixXd> gen_rates;  // per source position: |X| x |T|
  std::vector<LearnerSpec> learners;       // aligned with network.learners
  std::vector<TypeModel> types;            // size type_count
  double horizon = 1.0;
  TopologyStats topology_stats;

  RateIndex rate_index() const {
    return RateIndex{static_cast<int>(network.edges.size()),
                     static_cast<int>(pool.size()), type_count,
                     static_cast<int>(network.learners.size())};
  }

  double gen_rate(int source_pos, int x, int t) const {
    return gen_rates[source_pos](x, t);
  }

  void validate() const;
};

struct ScenarioConfig {
  TopologyKind kind = TopologyKind::ErdosRenyi;
  TopologyParams topology;
  int num_sources = 1;
  int num_learners = 1;
  int num_features = 1;
  int feature_dim = 1;
  int num_types = 1;
  std::uint64_t seed = 1;
  double horizon_T = 1.0;
  std::array<double, 2> capacity_range{50.0, 100.0};
  std::array<double, 2> rate_range{2.0, 5.0};
  std::array<double, 2> noise_range{0.5, 1.0};
  std::array<double, 2> prior_low_range{0.0, 0.01};
  std::array<double, 2> prior_high_range{100.0, 200.0};
  double poorly_known_prob = 0.5;
};

/// Samples a full scenario from the config; bit-reproducible in
/// (config, seed).
Scenario build_scenario(const ScenarioConfig& config);

double incoming_rate(const RateVector& rates, const Scenario& scenario,
                     int node, int feature, int type);
double outgoing_rate(const RateVector& rates, const Scenario& scenario,
                     int node, int feature, int type);

/// Empty result iff `rates` lies in the feasible polytope within tol.
std::vector<Violation> feasibility_check(const RateVector& rates,
                                         const Scenario& scenario, double tol);

/// The polytope D in LP standard form (objective left zero).
LpStandardForm constraint_matrices(const Scenario& scenario);

struct TheoryConstants {
  double lambda_max = 0.0;  // max over D of sum_l ||lambda^l||_1
  double g_max = 0.0;       // max single-sample design gain
  double lipschitz = 0.0;   // sqrt(2) |X| |L| T g_max
};

TheoryConstants compute_theory_constants(const Scenario& scenario);

}  // namespace ednet
