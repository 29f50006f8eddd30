#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ednet/network.hpp"
#include "ednet/rng.hpp"

namespace ednet {

enum class TopologyKind {
  ErdosRenyi,
  BalancedTree,
  Hypercube,
  Star,
  Grid,
  SmallWorld,
  FromFile,
};

TopologyKind parse_topology_kind(const std::string& name);
std::string topology_kind_name(TopologyKind kind);

struct TopologyParams {
  int nodes = 0;           // erdos_renyi, star
  double edge_prob = 0.1;  // erdos_renyi
  int branching = 2;       // balanced_tree
  int depth = 2;           // balanced_tree
  int dim = 3;             // hypercube
  int rows = 0;            // grid
  int cols = 0;            // grid
  int grid_side = 0;            // small_world base lattice
  int long_range_per_node = 1;  // small_world
  double long_range_exponent = 2.0;
  std::string file;  // from_file
};

struct UndirectedTopology {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, unique
};

/// Raw and post-orientation edge counts, recorded so either of the edge
/// counting conventions found in the literature can be reproduced.
struct TopologyStats {
  int nodes = 0;
  int undirected_edges = 0;
  int directed_pre_pruning = 0;  // both orientations of each undirected edge
  int oriented_edges = 0;        // after acyclic orientation
  int edges_after_pruning = 0;   // after source/learner edge removal
};

UndirectedTopology generate_undirected(TopologyKind kind,
                                       const TopologyParams& params, Rng& rng);

/// Whitespace-separated "u v" pairs, one per line; '#' starts a comment.
UndirectedTopology load_edge_list(const std::string& path);

/// Orients each undirected edge from lower to higher uniform-random
/// topological rank, yielding a DAG. Capacities are left zero.
Network orient_acyclic(const UndirectedTopology& topo, Rng& rng,
                       TopologyStats* stats = nullptr);

Network generate_topology(TopologyKind kind, const TopologyParams& params,
                          Rng& rng, TopologyStats* stats = nullptr);

}  // namespace ednet
