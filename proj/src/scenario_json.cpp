#include "ednet/scenario_json.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace ednet {

using nlohmann::json;

namespace {

std::array<double, 2> parse_range(const json& j, const std::string& key,
                                  std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2)
    throw ConfigError("config field '" + key + "' must be [lo, hi]");
  return {r[0].get<double>(), r[1].get<double>()};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw FileParseError("ragged matrix in scenario document");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    if (!j.contains("topology"))
      throw ConfigError("missing config field: topology");
    const json& topo = j.at("topology");
    if (!topo.contains("kind"))
      throw ConfigError("missing config field: topology.kind");
    cfg.kind = parse_topology_kind(topo.at("kind").get<std::string>());
    const json params = topo.value("params", json::object());
    cfg.topology.nodes = params.value("nodes", 0);
    cfg.topology.edge_prob = params.value("edge_prob", 0.1);
    cfg.topology.branching = params.value("branching", 2);
    cfg.topology.depth = params.value("depth", 2);
    cfg.topology.dim = params.value("dim", 3);
    cfg.topology.rows = params.value("rows", 0);
    cfg.topology.cols = params.value("cols", 0);
    cfg.topology.grid_side = params.value("grid_side", 0);
    cfg.topology.long_range_per_node = params.value("long_range_per_node", 1);
    cfg.topology.long_range_exponent =
        params.value("long_range_exponent", 2.0);
    if (topo.contains("file"))
      cfg.topology.file = topo.at("file").get<std::string>();
    if (cfg.kind == TopologyKind::FromFile && cfg.topology.file.empty())
      throw ConfigError("topology.file required for kind from_file");

    cfg.num_sources = j.value("num_sources", 1);
    cfg.num_learners = j.value("num_learners", 1);
    cfg.num_features = j.value("num_features", 1);
    cfg.feature_dim = j.value("feature_dim", 1);
    cfg.num_types = j.value("num_types", 1);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.horizon_T = j.value("horizon_T", 1.0);
    cfg.capacity_range = parse_range(j, "capacity_range", {50.0, 100.0});
    cfg.rate_range = parse_range(j, "rate_range", {2.0, 5.0});
    cfg.noise_range = parse_range(j, "noise_range", {0.5, 1.0});
    cfg.prior_low_range = parse_range(j, "prior_low_range", {0.0, 0.01});
    cfg.prior_high_range = parse_range(j, "prior_high_range", {100.0, 200.0});
    cfg.poorly_known_prob = j.value("poorly_known_prob", 0.5);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

std::string scenario_to_json(const Scenario& scenario) {
  json j;
  j["format"] = "ednet-scenario-v1";
  j["horizon_T"] = scenario.horizon;
  j["type_count"] = scenario.type_count;

  json net;
  net["node_count"] = scenario.network.node_count;
  json edges = json::array();
  for (const Edge& e : scenario.network.edges)
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"capacity", e.capacity}});
  net["edges"] = std::move(edges);
  net["sources"] = scenario.network.sources;
  net["learners"] = scenario.network.learners;
  j["network"] = std::move(net);

  j["features"] = matrix_to_json(scenario.pool.features);

  json types = json::array();
  for (const TypeModel& t : scenario.types)
    types.push_back({{"beta", vector_to_json(t.beta)},
                     {"noise_std", t.noise_std},
                     {"prior_diag", vector_to_json(t.prior_diag)}});
  j["types"] = std::move(types);

  json learners = json::array();
  for (const LearnerSpec& spec : scenario.learners)
    learners.push_back(
        {{"node", spec.node},
         {"target_type", spec.target_type},
         {"prior_precision", matrix_to_json(spec.design.prior_precision)},
         {"prior_mean", vector_to_json(spec.design.prior_mean)},
         {"noise_std", spec.design.noise_std}});
  j["learners"] = std::move(learners);

  json rates = json::array();
  for (const auto& g : scenario.gen_rates) rates.push_back(matrix_to_json(g));
  j["gen_rates"] = std::move(rates);

  j["topology_stats"] = {
      {"nodes", scenario.topology_stats.nodes},
      {"undirected_edges", scenario.topology_stats.undirected_edges},
      {"directed_pre_pruning", scenario.topology_stats.directed_pre_pruning},
      {"oriented_edges", scenario.topology_stats.oriented_edges},
      {"edges_after_pruning", scenario.topology_stats.edges_after_pruning}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FileParseError(std::string("scenario is not valid JSON: ") +
                         e.what());
  }
  Scenario sc;
  try {
    if (j.value("format", "") != "ednet-scenario-v1")
      throw FileParseError("unrecognized scenario format tag");
    sc.horizon = j.at("horizon_T").get<double>();
    sc.type_count = j.at("type_count").get<int>();

    const json& net = j.at("network");
    sc.network.node_count = net.at("node_count").get<int>();
    for (const json& e : net.at("edges"))
      sc.network.edges.push_back(Edge{e.at("tail").get<int>(),
                                      e.at("head").get<int>(),
                                      e.at("capacity").get<double>()});
    sc.network.sources = net.at("sources").get<std::vector<int>>();
    sc.network.learners = net.at("learners").get<std::vector<int>>();
    sc.network.finalize();

    sc.pool.features = matrix_from_json(j.at("features"));

    for (const json& t : j.at("types")) {
      TypeModel tm;
      tm.beta = vector_from_json(t.at("beta"));
      tm.noise_std = t.at("noise_std").get<double>();
      tm.prior_diag = vector_from_json(t.at("prior_diag"));
      sc.types.push_back(std::move(tm));
    }

    for (const json& l : j.at("learners")) {
      LearnerSpec spec;
      spec.node = l.at("node").get<int>();
      spec.target_type = l.at("target_type").get<int>();
      spec.design.prior_precision = matrix_from_json(l.at("prior_precision"));
      spec.design.prior_mean = vector_from_json(l.at("prior_mean"));
      spec.design.noise_std = l.at("noise_std").get<double>();
      sc.learners.push_back(std::move(spec));
    }

    for (const json& g : j.at("gen_rates"))
      sc.gen_rates.push_back(matrix_from_json(g));

    if (j.contains("topology_stats")) {
      const json& ts = j.at("topology_stats");
      sc.topology_stats.nodes = ts.value("nodes", 0);
      sc.topology_stats.undirected_edges = ts.value("undirected_edges", 0);
      sc.topology_stats.directed_pre_pruning =
          ts.value("directed_pre_pruning", 0);
      sc.topology_stats.oriented_edges = ts.value("oriented_edges", 0);
      sc.topology_stats.edges_after_pruning =
          ts.value("edges_after_pruning", 0);
    }
  } catch (const json::exception& e) {
    throw FileParseError(std::string("malformed scenario document: ") +
                         e.what());
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << scenario_to_json(scenario);
  if (!out) throw IoError("failed writing scenario file: " + path);
}

}  // namespace ednet
