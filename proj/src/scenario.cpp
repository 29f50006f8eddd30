#include "ednet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ednet/lp.hpp"

namespace ednet {

void Scenario::validate() const {
  if (type_count < 1) throw InvalidScenario("type_count must be >= 1");
  if (pool.size() < 1) throw InvalidScenario("feature pool is empty");
  if (horizon <= 0.0) throw InvalidScenario("horizon must be positive");
  if (gen_rates.size() != network.sources.size())
    throw InvalidScenario("gen_rates size does not match sources");
  for (const auto& g : gen_rates) {
    if (g.rows() != pool.size() || g.cols() != type_count)
      throw InvalidScenario("gen_rates block has wrong shape");
    if ((g.array() < 0.0).any())
      throw InvalidScenario("negative generation rate");
  }
  if (learners.size() != network.learners.size())
    throw InvalidScenario("learner specs do not match learner nodes");
  for (std::size_t i = 0; i < learners.size(); ++i) {
    const LearnerSpec& spec = learners[i];
    if (spec.node != network.learners[i])
      throw InvalidScenario("learner spec out of order");
    if (spec.target_type < 0 || spec.target_type >= type_count)
      throw InvalidScenario("learner target type out of range");
    spec.design.validate();
    if (spec.design.dimension() != pool.dimension())
      throw InvalidScenario("learner design dimension mismatch");
  }
  if (static_cast<int>(types.size()) != type_count)
    throw InvalidScenario("type models do not match type_count");
  for (const TypeModel& t : types) {
    if (t.beta.size() != pool.dimension())
      throw InvalidScenario("type model beta has wrong length");
    if (!(t.noise_std > 0.0)) throw InvalidScenario("type noise must be > 0");
  }
}

Scenario build_scenario(const ScenarioConfig& config) {
  if (config.num_sources < 1 || config.num_learners < 1)
    throw ConfigError("need at least one source and one learner");
  if (config.num_features < 1 || config.feature_dim < 1 ||
      config.num_types < 1)
    throw ConfigError("num_features, feature_dim, num_types must be >= 1");
  if (config.horizon_T <= 0.0) throw ConfigError("horizon_T must be positive");
  for (auto [lo, hi] : {config.capacity_range, config.rate_range,
                        config.noise_range, config.prior_low_range,
                        config.prior_high_range})
    if (lo > hi || lo < 0.0) throw ConfigError("invalid range [lo, hi]");
  if (!(config.noise_range[0] > 0.0))
    throw ConfigError("noise range must be strictly positive");

  // Independent substreams per stage keep draws stable if stages evolve.
  Rng rng_topo(derive_seed({config.seed, 0x10}));
  Rng rng_roles(derive_seed({config.seed, 0x20}));
  Rng rng_caps(derive_seed({config.seed, 0x30}));
  Rng rng_feat(derive_seed({config.seed, 0x40}));
  Rng rng_types(derive_seed({config.seed, 0x50}));
  Rng rng_rates(derive_seed({config.seed, 0x60}));

  Scenario sc;
  sc.network = generate_topology(config.kind, config.topology, rng_topo,
                                 &sc.topology_stats);

  const int v = sc.network.node_count;
  if (config.num_sources + config.num_learners > v)
    throw ConfigError("num_sources + num_learners exceeds node count");

  // Roles u.a.r.: shuffle nodes, take sources then learners.
  std::vector<int> order(v);
  std::iota(order.begin(), order.end(), 0);
  for (int i = v - 1; i > 0; --i) {
    int j = static_cast<int>(rng_roles.next_u64() %
                             static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  sc.network.sources.assign(order.begin(), order.begin() + config.num_sources);
  sc.network.learners.assign(order.begin() + config.num_sources,
                             order.begin() + config.num_sources +
                                 config.num_learners);
  std::sort(sc.network.sources.begin(), sc.network.sources.end());
  std::sort(sc.network.learners.begin(), sc.network.learners.end());

  // Remove incoming edges of sources and outgoing edges of learners.
  std::vector<Edge> kept;
  kept.reserve(sc.network.edges.size());
  for (const Edge& e : sc.network.edges) {
    bool drop = std::binary_search(sc.network.sources.begin(),
                                   sc.network.sources.end(), e.head) ||
                std::binary_search(sc.network.learners.begin(),
                                   sc.network.learners.end(), e.tail);
    if (!drop) kept.push_back(e);
  }
  sc.network.edges = std::move(kept);
  sc.topology_stats.edges_after_pruning =
      static_cast<int>(sc.network.edges.size());

  for (Edge& e : sc.network.edges)
    e.capacity = rng_caps.uniform(config.capacity_range[0],
                                  config.capacity_range[1]);
  sc.network.finalize();

  // Features: iid standard normal, unit-normalized.
  sc.pool.features.resize(config.feature_dim, config.num_features);
  for (int x = 0; x < config.num_features; ++x) {
    for (int i = 0; i < config.feature_dim; ++i)
      sc.pool.features(i, x) = rng_feat.normal();
    double norm = sc.pool.features.col(x).norm();
    if (norm > 0.0) sc.pool.features.col(x) /= norm;
  }

  // Per-type noise, diagonal prior (well-known vs poorly-known coordinate
  // split), and a true model drawn from that prior.
  sc.type_count = config.num_types;
  sc.types.resize(config.num_types);
  for (TypeModel& t : sc.types) {
    t.noise_std = rng_types.uniform(config.noise_range[0],
                                    config.noise_range[1]);
    t.prior_diag.resize(config.feature_dim);
    for (int i = 0; i < config.feature_dim; ++i) {
      bool poorly = rng_types.uniform() < config.poorly_known_prob;
      double var = poorly ? rng_types.uniform(config.prior_high_range[0],
                                              config.prior_high_range[1])
                          : rng_types.uniform(config.prior_low_range[0],
                                              config.prior_low_range[1]);
      t.prior_diag[i] = std::max(var, 1e-9);  // keep the precision finite
    }
    t.beta.resize(config.feature_dim);
    for (int i = 0; i < config.feature_dim; ++i)
      t.beta[i] = rng_types.normal(0.0, std::sqrt(t.prior_diag[i]));
  }

  // Learner target types u.a.r.; design inherits the type's prior.
  sc.learners.resize(sc.network.learners.size());
  for (std::size_t l = 0; l < sc.learners.size(); ++l) {
    LearnerSpec& spec = sc.learners[l];
    spec.node = sc.network.learners[l];
    spec.target_type = static_cast<int>(
        rng_types.next_u64() % static_cast<std::uint64_t>(config.num_types));
    const TypeModel& t = sc.types[spec.target_type];
    spec.design.prior_precision =
        t.prior_diag.cwiseInverse().asDiagonal().toDenseMatrix();
    spec.design.prior_mean = Eigen::VectorXd::Zero(config.feature_dim);
    spec.design.noise_std = t.noise_std;
  }

  sc.gen_rates.resize(sc.network.sources.size());
  for (auto& g : sc.gen_rates) {
    g.resize(config.num_features, config.num_types);
    for (int x = 0; x < config.num_features; ++x)
      for (int t = 0; t < config.num_types; ++t)
        g(x, t) = rng_rates.uniform(config.rate_range[0], config.rate_range[1]);
  }

  sc.horizon = config.horizon_T;
  sc.validate();
  return sc;
}

namespace {

void check_ids(const Scenario& sc, int node, int feature, int type) {
  if (node < 0 || node >= sc.network.node_count)
    throw UnknownNode("node out of range: " + std::to_string(node));
  if (feature < 0 || feature >= sc.pool.size())
    throw UnknownFeature("feature out of range: " + std::to_string(feature));
  if (type < 0 || type >= sc.type_count)
    throw IndexMismatch("type out of range: " + std::to_string(type));
}

void check_shape(const RateVector& rates, const Scenario& sc) {
  if (!(rates.index == sc.rate_index()) ||
      rates.values.size() != rates.index.size())
    throw IndexMismatch("rate vector shape does not match scenario");
}

}  // namespace

double incoming_rate(const RateVector& rates, const Scenario& scenario,
                     int node, int feature, int type) {
  check_ids(scenario, node, feature, type);
  check_shape(rates, scenario);
  const int spos = scenario.network.source_position(node);
  if (spos >= 0) return scenario.gen_rate(spos, feature, type);
  double total = 0.0;
  for (int e : scenario.network.in_edges[node])
    total += rates.edge_rate(e, feature, type);
  return total;
}

double outgoing_rate(const RateVector& rates, const Scenario& scenario,
                     int node, int feature, int type) {
  check_ids(scenario, node, feature, type);
  check_shape(rates, scenario);
  double total = 0.0;
  for (int e : scenario.network.out_edges[node])
    total += rates.edge_rate(e, feature, type);
  return total;
}

std::vector<Violation> feasibility_check(const RateVector& rates,
                                         const Scenario& scenario,
                                         double tol) {
  check_shape(rates, scenario);
  std::vector<Violation> out;
  const RateIndex idx = rates.index;

  for (int i = 0; i < rates.values.size(); ++i)
    if (rates.values[i] < -tol)
      out.push_back({ViolationKind::Negativity, "var " + std::to_string(i),
                     -rates.values[i]});

  for (int e = 0; e < idx.edge_count; ++e) {
    double total = 0.0;
    for (int x = 0; x < idx.feature_count; ++x)
      for (int t = 0; t < idx.type_count; ++t) total += rates.edge_rate(e, x, t);
    double cap = scenario.network.edges[e].capacity;
    if (total > cap + tol)
      out.push_back({ViolationKind::Capacity, "edge " + std::to_string(e),
                     total - cap});
  }

  for (int v = 0; v < scenario.network.node_count; ++v) {
    if (scenario.network.is_learner(v)) continue;
    for (int x = 0; x < idx.feature_count; ++x)
      for (int t = 0; t < idx.type_count; ++t) {
        double in = incoming_rate(rates, scenario, v, x, t);
        double outr = outgoing_rate(rates, scenario, v, x, t);
        if (outr > in + tol)
          out.push_back({ViolationKind::FlowBound,
                         "node " + std::to_string(v) + " feature " +
                             std::to_string(x) + " type " + std::to_string(t),
                         outr - in});
      }
  }

  for (int l = 0; l < idx.learner_count; ++l) {
    int node = scenario.network.learners[l];
    int tt = scenario.learners[l].target_type;
    for (int x = 0; x < idx.feature_count; ++x) {
      double in = incoming_rate(rates, scenario, node, x, tt);
      double lr = rates.learner_rate(l, x);
      if (std::abs(lr - in) > tol)
        out.push_back({ViolationKind::LearnerEquality,
                       "learner " + std::to_string(node) + " feature " +
                           std::to_string(x),
                       std::abs(lr - in)});
    }
  }
  return out;
}

LpStandardForm constraint_matrices(const Scenario& scenario) {
  scenario.validate();
  const RateIndex idx = scenario.rate_index();
  const int n = idx.size();
  const Network& net = scenario.network;

  std::vector<Eigen::Triplet<double>> ineq, eq;
  std::vector<double> ineq_rhs, eq_rhs;
  int row = 0;

  // Capacity: sum_{x,t} edge rate <= mu_e.
  for (int e = 0; e < idx.edge_count; ++e) {
    for (int x = 0; x < idx.feature_count; ++x)
      for (int t = 0; t < idx.type_count; ++t)
        ineq.emplace_back(row, idx.edge_var(e, x, t), 1.0);
    ineq_rhs.push_back(net.edges[e].capacity);
    ++row;
  }

  // Flow bounds at every non-learner node; at sources the incoming side is
  // the generation rate, moved to the right-hand side.
  for (int v = 0; v < net.node_count; ++v) {
    if (net.is_learner(v)) continue;
    const int spos = net.source_position(v);
    for (int x = 0; x < idx.feature_count; ++x)
      for (int t = 0; t < idx.type_count; ++t) {
        for (int e : net.out_edges[v])
          ineq.emplace_back(row, idx.edge_var(e, x, t), 1.0);
        if (spos >= 0) {
          ineq_rhs.push_back(scenario.gen_rate(spos, x, t));
        } else {
          for (int e : net.in_edges[v])
            ineq.emplace_back(row, idx.edge_var(e, x, t), -1.0);
          ineq_rhs.push_back(0.0);
        }
        ++row;
      }
  }

  // Learner delivery equals incoming traffic of the target type.
  int erow = 0;
  for (int l = 0; l < idx.learner_count; ++l) {
    int node = net.learners[l];
    int tt = scenario.learners[l].target_type;
    for (int x = 0; x < idx.feature_count; ++x) {
      eq.emplace_back(erow, idx.learner_var(l, x), 1.0);
      for (int e : net.in_edges[node])
        eq.emplace_back(erow, idx.edge_var(e, x, tt), -1.0);
      eq_rhs.push_back(0.0);
      ++erow;
    }
  }

  LpStandardForm lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.ineq_matrix.resize(row, n);
  lp.ineq_matrix.setFromTriplets(ineq.begin(), ineq.end());
  lp.ineq_rhs = Eigen::Map<Eigen::VectorXd>(ineq_rhs.data(),
                                            static_cast<int>(ineq_rhs.size()));
  lp.eq_matrix.resize(erow, n);
  lp.eq_matrix.setFromTriplets(eq.begin(), eq.end());
  lp.eq_rhs = erow > 0 ? Eigen::Map<Eigen::VectorXd>(
                             eq_rhs.data(), static_cast<int>(eq_rhs.size()))
                       : Eigen::VectorXd(0);
  return lp;
}

TheoryConstants compute_theory_constants(const Scenario& scenario) {
  TheoryConstants out;
  const RateIndex idx = scenario.rate_index();

  LpStandardForm lp = constraint_matrices(scenario);
  for (int l = 0; l < idx.learner_count; ++l)
    for (int x = 0; x < idx.feature_count; ++x)
      lp.objective[idx.learner_var(l, x)] = 1.0;
  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw InvalidScenario("lambda_max LP did not solve: " +
                          std::string(to_string(sol.status)));
  out.lambda_max = sol.objective_value;

  // G_MAX = max over (l, x) of log(1 + x^T Sigma_l x / sigma^2).
  out.g_max = 0.0;
  for (const LearnerSpec& spec : scenario.learners) {
    Eigen::LLT<Eigen::MatrixXd> llt(spec.design.prior_precision);
    for (int x = 0; x < idx.feature_count; ++x) {
      Eigen::VectorXd half =
          llt.matrixL().solve(scenario.pool.features.col(x));
      double gain = std::log1p(half.squaredNorm() /
                               (spec.design.noise_std * spec.design.noise_std));
      out.g_max = std::max(out.g_max, gain);
    }
  }

  out.lipschitz = std::sqrt(2.0) * static_cast<double>(idx.feature_count) *
                  static_cast<double>(idx.learner_count) * scenario.horizon *
                  out.g_max;
  return out;
}

}  // namespace ednet
