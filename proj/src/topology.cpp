#include "ednet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ednet {

TopologyKind parse_topology_kind(const std::string& name) {
  if (name == "erdos_renyi" || name == "er") return TopologyKind::ErdosRenyi;
  if (name == "balanced_tree" || name == "bt") return TopologyKind::BalancedTree;
  if (name == "hypercube" || name == "hc") return TopologyKind::Hypercube;
  if (name == "star") return TopologyKind::Star;
  if (name == "grid") return TopologyKind::Grid;
  if (name == "small_world" || name == "sw") return TopologyKind::SmallWorld;
  if (name == "from_file" || name == "file") return TopologyKind::FromFile;
  throw UnsupportedKind("unknown topology kind: " + name);
}

std::string topology_kind_name(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::ErdosRenyi:
      return "erdos_renyi";
    case TopologyKind::BalancedTree:
      return "balanced_tree";
    case TopologyKind::Hypercube:
      return "hypercube";
    case TopologyKind::Star:
      return "star";
    case TopologyKind::Grid:
      return "grid";
    case TopologyKind::SmallWorld:
      return "small_world";
    case TopologyKind::FromFile:
      return "from_file";
  }
  return "unknown";
}

namespace {

using EdgeSet = std::set<std::pair<int, int>>;

void add_edge(EdgeSet& edges, int u, int v) {
  if (u == v) return;
  if (u > v) std::swap(u, v);
  edges.insert({u, v});
}

UndirectedTopology from_edge_set(int nodes, const EdgeSet& edges) {
  UndirectedTopology topo;
  topo.nodes = nodes;
  topo.edges.assign(edges.begin(), edges.end());
  return topo;
}

UndirectedTopology erdos_renyi(int n, double p, Rng& rng) {
  if (n < 1) throw UnsupportedKind("erdos_renyi: nodes must be >= 1");
  if (p < 0.0 || p > 1.0)
    throw UnsupportedKind("erdos_renyi: edge_prob must be in [0,1]");
  EdgeSet edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform() < p) add_edge(edges, u, v);
  return from_edge_set(n, edges);
}

UndirectedTopology balanced_tree(int branching, int depth) {
  if (branching < 1 || depth < 0)
    throw UnsupportedKind("balanced_tree: branching >= 1 and depth >= 0");
  EdgeSet edges;
  // Nodes are numbered breadth-first; node count is sum of r^k, k=0..depth.
  long long total = 0, level = 1;
  for (int k = 0; k <= depth; ++k) {
    total += level;
    level *= branching;
  }
  int n = static_cast<int>(total);
  int next = 1;
  for (int parent = 0; next < n; ++parent)
    for (int c = 0; c < branching && next < n; ++c) add_edge(edges, parent, next++);
  return from_edge_set(n, edges);
}

UndirectedTopology hypercube(int dim) {
  if (dim < 1 || dim > 24) throw UnsupportedKind("hypercube: dim in [1,24]");
  int n = 1 << dim;
  EdgeSet edges;
  for (int u = 0; u < n; ++u)
    for (int b = 0; b < dim; ++b) add_edge(edges, u, u ^ (1 << b));
  return from_edge_set(n, edges);
}

UndirectedTopology star(int n) {
  if (n < 2) throw UnsupportedKind("star: nodes must be >= 2");
  EdgeSet edges;
  for (int v = 1; v < n; ++v) add_edge(edges, 0, v);
  return from_edge_set(n, edges);
}

UndirectedTopology grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw UnsupportedKind("grid: rows, cols >= 1");
  EdgeSet edges;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add_edge(edges, id(r, c), id(r, c + 1));
      if (r + 1 < rows) add_edge(edges, id(r, c), id(r + 1, c));
    }
  return from_edge_set(rows * cols, edges);
}

// Kleinberg small world: 2D lattice plus q long-range contacts per node,
// sampled with probability proportional to (manhattan distance)^-exponent.
UndirectedTopology small_world(int side, int q, double exponent, Rng& rng) {
  if (side < 2) throw UnsupportedKind("small_world: grid_side must be >= 2");
  if (q < 0) throw UnsupportedKind("small_world: long_range_per_node >= 0");
  UndirectedTopology base = grid(side, side);
  EdgeSet edges(base.edges.begin(), base.edges.end());
  const int n = side * side;
  auto row = [side](int v) { return v / side; };
  auto col = [side](int v) { return v % side; };
  std::vector<double> weight(n);
  for (int u = 0; u < n; ++u) {
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
      if (v == u) {
        weight[v] = 0.0;
        continue;
      }
      int dist = std::abs(row(u) - row(v)) + std::abs(col(u) - col(v));
      weight[v] = std::pow(static_cast<double>(dist), -exponent);
      total += weight[v];
    }
    for (int c = 0; c < q; ++c) {
      double r = rng.uniform() * total;
      double acc = 0.0;
      int target = n - 1;
      for (int v = 0; v < n; ++v) {
        acc += weight[v];
        if (r < acc) {
          target = v;
          break;
        }
      }
      add_edge(edges, u, target);
    }
  }
  return from_edge_set(n, edges);
}

}  // namespace

UndirectedTopology load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileParseError("cannot open topology file: " + path);
  EdgeSet raw;
  std::map<long, int> relabel;
  std::vector<std::pair<long, long>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ss(line);
    long u, v;
    if (!(ss >> u)) continue;  // blank line
    if (!(ss >> v))
      throw FileParseError(path + ":" + std::to_string(lineno) +
                           ": expected 'u v' pair");
    long extra;
    if (ss >> extra)
      throw FileParseError(path + ":" + std::to_string(lineno) +
                           ": trailing tokens");
    pairs.emplace_back(u, v);
    relabel[u];
    relabel[v];
  }
  int next = 0;
  for (auto& [id, idx] : relabel) idx = next++;
  EdgeSet edges;
  for (auto [u, v] : pairs) add_edge(edges, relabel[u], relabel[v]);
  return from_edge_set(next, edges);
}

Network orient_acyclic(const UndirectedTopology& topo, Rng& rng,
                       TopologyStats* stats) {
  // Uniform random ranks; every edge points from lower to higher rank.
  std::vector<int> rank(topo.nodes);
  std::iota(rank.begin(), rank.end(), 0);
  for (int i = topo.nodes - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(rank[i], rank[j]);
  }
  Network net;
  net.node_count = topo.nodes;
  net.edges.reserve(topo.edges.size());
  for (auto [u, v] : topo.edges) {
    if (rank[u] < rank[v])
      net.edges.push_back(Edge{u, v, 0.0});
    else
      net.edges.push_back(Edge{v, u, 0.0});
  }
  if (stats) {
    stats->nodes = topo.nodes;
    stats->undirected_edges = static_cast<int>(topo.edges.size());
    stats->directed_pre_pruning = 2 * static_cast<int>(topo.edges.size());
    stats->oriented_edges = static_cast<int>(net.edges.size());
    stats->edges_after_pruning = static_cast<int>(net.edges.size());
  }
  net.finalize();
  return net;
}

Network generate_topology(TopologyKind kind, const TopologyParams& params,
                          Rng& rng, TopologyStats* stats) {
  UndirectedTopology topo;
  switch (kind) {
    case TopologyKind::ErdosRenyi:
      topo = erdos_renyi(params.nodes, params.edge_prob, rng);
      break;
    case TopologyKind::BalancedTree:
      topo = balanced_tree(params.branching, params.depth);
      break;
    case TopologyKind::Hypercube:
      topo = hypercube(params.dim);
      break;
    case TopologyKind::Star:
      topo = star(params.nodes);
      break;
    case TopologyKind::Grid:
      topo = grid(params.rows, params.cols);
      break;
    case TopologyKind::SmallWorld:
      topo = small_world(params.grid_side, params.long_range_per_node,
                         params.long_range_exponent, rng);
      break;
    case TopologyKind::FromFile:
      topo = load_edge_list(params.file);
      break;
  }
  return orient_acyclic(topo, rng, stats);
}

}  // namespace ednet
