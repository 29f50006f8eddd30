#include "ednet/network.hpp"

#include <algorithm>
#include <queue>

namespace ednet {

void Network::finalize() {
  in_edges.assign(node_count, {});
  out_edges.assign(node_count, {});
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& edge = edges[e];
    if (edge.tail < 0 || edge.tail >= node_count || edge.head < 0 ||
        edge.head >= node_count)
      throw InvalidScenario("edge endpoint out of range");
    if (edge.tail == edge.head) throw InvalidScenario("self-loop edge");
    if (edge.capacity < 0.0) throw InvalidScenario("negative edge capacity");
    out_edges[edge.tail].push_back(e);
    in_edges[edge.head].push_back(e);
  }
  if (!std::is_sorted(sources.begin(), sources.end()))
    std::sort(sources.begin(), sources.end());
  if (!std::is_sorted(learners.begin(), learners.end()))
    std::sort(learners.begin(), learners.end());
  for (int s : sources) {
    if (s < 0 || s >= node_count) throw InvalidScenario("source out of range");
    if (!in_edges[s].empty())
      throw InvalidScenario("source " + std::to_string(s) +
                            " has incoming edges");
    if (is_learner(s))
      throw InvalidScenario("node " + std::to_string(s) +
                            " is both source and learner");
  }
  for (int l : learners) {
    if (l < 0 || l >= node_count) throw InvalidScenario("learner out of range");
    if (!out_edges[l].empty())
      throw InvalidScenario("learner " + std::to_string(l) +
                            " has outgoing edges");
  }
  (void)topological_order();  // throws on cycles
}

bool Network::is_source(int node) const {
  return std::binary_search(sources.begin(), sources.end(), node);
}

bool Network::is_learner(int node) const {
  return std::binary_search(learners.begin(), learners.end(), node);
}

int Network::source_position(int node) const {
  auto it = std::lower_bound(sources.begin(), sources.end(), node);
  if (it == sources.end() || *it != node) return -1;
  return static_cast<int>(it - sources.begin());
}

int Network::learner_position(int node) const {
  auto it = std::lower_bound(learners.begin(), learners.end(), node);
  if (it == learners.end() || *it != node) return -1;
  return static_cast<int>(it - learners.begin());
}

std::vector<int> Network::topological_order() const {
  std::vector<int> indegree(node_count, 0);
  for (const Edge& e : edges) ++indegree[e.head];
  std::queue<int> ready;
  for (int v = 0; v < node_count; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<int> order;
  order.reserve(node_count);
  std::vector<std::vector<int>> out(node_count);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    out[edges[e].tail].push_back(edges[e].head);
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    order.push_back(v);
    for (int w : out[v])
      if (--indegree[w] == 0) ready.push(w);
  }
  if (static_cast<int>(order.size()) != node_count)
    throw InvalidScenario("graph is not a DAG");
  return order;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Negativity:
      return "negativity";
    case ViolationKind::Capacity:
      return "capacity";
    case ViolationKind::FlowBound:
      return "flow_bound";
    case ViolationKind::LearnerEquality:
      return "learner_equality";
  }
  return "unknown";
}

}  // namespace ednet
