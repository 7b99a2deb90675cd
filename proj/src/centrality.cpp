#include "cometa/centrality.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace cometa::graph {

UndirectedGraph::UndirectedGraph(std::size_t num_nodes, std::span<const WeightedEdge> edges)
    : adjacency_(num_nodes) {
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::size_t>> keyed;
  keyed.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v, w] = edges[i];
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    keyed.push_back({{u, v}, i});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    const auto [u, v] = keyed[i].first;
    const double w = edges[keyed[i].second].weight;
    adjacency_[u].push_back({v, w});
    adjacency_[v].push_back({u, w});
    ++num_edges_;
  }
}

std::vector<std::int64_t> bfs_distances(const UndirectedGraph& graph, std::size_t source) {
  std::vector<std::int64_t> dist(graph.size(), -1);
  std::queue<std::size_t> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const auto x = frontier.front();
    frontier.pop();
    for (const auto& nb : graph.neighbors(x)) {
      if (dist[nb.node] < 0) {
        dist[nb.node] = dist[x] + 1;
        frontier.push(nb.node);
      }
    }
  }
  return dist;
}

namespace {

std::vector<double> dijkstra(const UndirectedGraph& graph, std::size_t source) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d > dist[x]) continue;
    for (const auto& nb : graph.neighbors(x)) {
      const double nd = d + 1.0 / nb.weight;
      if (nd < dist[nb.node]) {
        dist[nb.node] = nd;
        heap.push({nd, nb.node});
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<double> closeness(const UndirectedGraph& graph, bool weighted) {
  const std::size_t n = graph.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t v = 0; v < n; ++v) {
    double total = 0.0;
    std::size_t reachable = 0;
    if (weighted) {
      for (const double d : dijkstra(graph, v)) {
        if (d > 0.0 && d < std::numeric_limits<double>::infinity()) {
          total += d;
          ++reachable;
        }
      }
    } else {
      for (const auto d : bfs_distances(graph, v)) {
        if (d > 0) {
          total += static_cast<double>(d);
          ++reachable;
        }
      }
    }
    if (reachable == 0) continue;
    const auto r = static_cast<double>(reachable);
    out[v] = (r / total) * (r / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace cometa::graph
