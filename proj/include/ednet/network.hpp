#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ednet/errors.hpp"

namespace ednet {

struct Edge {
  int tail = 0;
  int head = 0;
  double capacity = 0.0;
};

/// Directed acyclic multi-hop network. Sources have no incoming edges,
/// learners no outgoing edges, and the two sets are disjoint.
struct Network {
  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<int> sources;   // sorted, unique
  std::vector<int> learners;  // sorted, unique

  // Adjacency (edge indices), built by finalize().
  std::vector<std::vector<int>> in_edges;
  std::vector<std::vector<int>> out_edges;

  /// Builds adjacency and checks the structural invariants.
  void finalize();

  bool is_source(int node) const;
  bool is_learner(int node) const;
  /// Position of `node` in sources/learners, or -1.
  int source_position(int node) const;
  int learner_position(int node) const;
  /// Topological order of nodes; throws InvalidScenario on cycles.
  std::vector<int> topological_order() const;
};

/// Canonical variable layout shared by RateVector and the LP: edge rates
/// first (edge-major, then feature, then type), learner rates after.
struct RateIndex {
  int edge_count = 0;
  int feature_count = 0;
  int type_count = 0;
  int learner_count = 0;

  int edge_var(int e, int x, int t) const {
    return (e * feature_count + x) * type_count + t;
  }
  int learner_var(int l, int x) const {
    return edge_count * feature_count * type_count + l * feature_count + x;
  }
  int size() const {
    return edge_count * feature_count * type_count +
           learner_count * feature_count;
  }
  bool operator==(const RateIndex&) const = default;
};

/// The decision variable: per-edge per-(feature,type) rates plus per-learner
/// per-feature delivery rates, stored densely in canonical order.
struct RateVector {
  RateIndex index;
  Eigen::VectorXd values;

  static RateVector zero(const RateIndex& idx) {
    return RateVector{idx, Eigen::VectorXd::Zero(idx.size())};
  }

  double edge_rate(int e, int x, int t) const {
    return values[index.edge_var(e, x, t)];
  }
  double& edge_rate(int e, int x, int t) {
    return values[index.edge_var(e, x, t)];
  }
  double learner_rate(int l, int x) const {
    return values[index.learner_var(l, x)];
  }
  double& learner_rate(int l, int x) {
    return values[index.learner_var(l, x)];
  }
};

enum class ViolationKind { Negativity, Capacity, FlowBound, LearnerEquality };

struct Violation {
  ViolationKind kind;
  std::string where;
  double magnitude = 0.0;
};

const char* to_string(ViolationKind kind);

}  // namespace ednet
