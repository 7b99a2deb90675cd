#include "cometa/coocnet.hpp"

#include <algorithm>
#include <cmath>

#include "cometa/error.hpp"

namespace cometa::coocnet {

CoocMode parse_mode(std::string_view name) {
  if (name == "binary") return CoocMode::kBinary;
  if (name == "count") return CoocMode::kCount;
  throw Error(ErrorKind::kConfiguration, "unknown co-occurrence mode: '" + std::string(name) + "'");
}

std::string_view to_string(CoocMode mode) {
  return mode == CoocMode::kBinary ? "binary" : "count";
}

std::uint64_t CoocGraph::weight(std::size_t u, std::size_t v) const {
  if (u > v) std::swap(u, v);
  const auto it = edges.find({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
  return it == edges.end() ? 0 : it->second;
}

graph::UndirectedGraph CoocGraph::topology() const {
  std::vector<graph::WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& [pair, w] : edges) {
    list.push_back({pair.first, pair.second, static_cast<double>(w)});
  }
  return graph::UndirectedGraph(nodes.size(), list);
}

CoocGraph cooccurrence(const dtm::DocumentTermMatrix& dtm, CoocMode mode,
                       std::uint64_t min_weight) {
  CoocGraph g;
  g.nodes = dtm.vocabulary;
  g.mode = mode;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    const auto row = dtm.row(d);
    for (std::size_t i = 0; i < row.size(); ++i) {
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        const std::uint64_t w = mode == CoocMode::kBinary
                                    ? 1
                                    : static_cast<std::uint64_t>(row[i].count) * row[j].count;
        g.edges[{row[i].term, row[j].term}] += w;
      }
    }
  }
  if (min_weight > 1) {
    std::erase_if(g.edges, [&](const auto& kv) { return kv.second < min_weight; });
  }
  return g;
}

std::map<std::string, double> degree_centrality(const CoocGraph& graph) {
  const std::size_t n = graph.nodes.size();
  if (n < 2) {
    throw Error(ErrorKind::kDegenerateGraph, "degree centrality needs at least two nodes");
  }
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [pair, w] : graph.edges) {
    ++degree[pair.first];
    ++degree[pair.second];
  }
  std::map<std::string, double> out;
  for (std::size_t v = 0; v < n; ++v) {
    out[graph.nodes[v]] = static_cast<double>(degree[v]) / static_cast<double>(n - 1);
  }
  return out;
}

std::map<std::string, double> closeness_centrality(const CoocGraph& graph) {
  const auto values = graph::closeness(graph.topology());
  std::map<std::string, double> out;
  for (std::size_t v = 0; v < graph.nodes.size(); ++v) out[graph.nodes[v]] = values[v];
  return out;
}

CentralityTable centrality_table(const CoocGraph& graph) {
  const auto degree = degree_centrality(graph);
  const auto close = closeness_centrality(graph);
  CentralityTable table;
  table.rows.reserve(graph.nodes.size());
  for (const auto& node : graph.nodes) {
    table.rows.push_back({node, degree.at(node), close.at(node)});
  }
  return table;
}

graph::NetworkExport to_network(const CoocGraph& graph, const CentralityTable& table) {
  graph::NetworkExport net;
  std::map<std::string_view, const CentralityRow*> by_node;
  for (const auto& r : table.rows) by_node[r.node] = &r;
  for (const auto& node : graph.nodes) {
    const auto it = by_node.find(node);
    net.nodes.push_back({node, "", it != by_node.end() ? it->second->degree_norm : 0.0,
                         it != by_node.end() ? it->second->closeness_norm : 0.0});
  }
  for (const auto& [pair, w] : graph.edges) {
    net.edges.push_back(
        {graph.nodes[pair.first], graph.nodes[pair.second], static_cast<double>(w)});
  }
  return net;
}

std::string export_graph(const CoocGraph& graph, const CentralityTable& table,
                         graph::GraphFormat format) {
  return graph::write_graph(to_network(graph, table), format);
}

CoocGraph import_graph(std::string_view text, graph::GraphFormat format, CoocMode mode) {
  const auto net = graph::read_graph(text, format);
  CoocGraph g;
  g.mode = mode;
  for (const auto& n : net.nodes) g.nodes.push_back(n.id);
  std::sort(g.nodes.begin(), g.nodes.end());
  g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
  auto index_of = [&](const std::string& id) {
    const auto it = std::lower_bound(g.nodes.begin(), g.nodes.end(), id);
    if (it == g.nodes.end() || *it != id) {
      throw Error(ErrorKind::kInvalidInput, "edge references unknown node '" + id + "'");
    }
    return static_cast<std::uint32_t>(it - g.nodes.begin());
  };
  for (const auto& e : net.edges) {
    auto u = index_of(e.source);
    auto v = index_of(e.target);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!(e.weight >= 1.0) || std::floor(e.weight) != e.weight) {
      throw Error(ErrorKind::kInvalidInput, "co-occurrence weights must be positive integers");
    }
    g.edges.emplace(std::make_pair(u, v), static_cast<std::uint64_t>(e.weight));
  }
  return g;
}

}  // namespace cometa::coocnet
