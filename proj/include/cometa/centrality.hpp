#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cometa::graph {

struct WeightedEdge {
  std::uint32_t u;
  std::uint32_t v;
  double weight = 1.0;
};

/// Simple undirected graph on nodes [0, n). Self-loops are dropped and a
/// repeated edge keeps its first weight, so submitting duplicates is harmless.
class UndirectedGraph {
 public:
  struct Neighbor {
    std::uint32_t node;
    double weight;
  };

  UndirectedGraph(std::size_t num_nodes, std::span<const WeightedEdge> edges);

  std::size_t size() const { return adjacency_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  std::span<const Neighbor> neighbors(std::size_t node) const { return adjacency_[node]; }
  std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// Hop distances from `source`; unreachable nodes get -1.
std::vector<std::int64_t> bfs_distances(const UndirectedGraph& graph, std::size_t source);

/// Closeness of every node: with r reachable nodes at total distance S,
/// (r / S) * (r / (n - 1)); isolated nodes score 0. When `weighted` is set
/// edge lengths are 1 / weight instead of 1; with weights in (0, 1] the
/// result stays within [0, 1].
std::vector<double> closeness(const UndirectedGraph& graph, bool weighted = false);

}  // namespace cometa::graph
