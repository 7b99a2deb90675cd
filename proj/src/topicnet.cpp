#include "cometa/topicnet.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "cometa/error.hpp"

namespace cometa::topicnet {

std::string topic_label(std::size_t topic) { return "Topic " + std::to_string(topic + 1); }

graph::UndirectedGraph BipartiteGraph::topology() const {
  const auto K = topic_nodes.size();
  std::vector<graph::WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& e : edges) {
    list.push_back({static_cast<std::uint32_t>(e.topic), static_cast<std::uint32_t>(K + e.term),
                    e.weight});
  }
  return graph::UndirectedGraph(K + term_nodes.size(), list);
}

std::vector<std::size_t> BipartiteGraph::term_memberships() const {
  std::vector<std::size_t> out(term_nodes.size(), 0);
  for (const auto& e : edges) ++out[e.term];
  return out;
}

std::vector<std::size_t> BipartiteGraph::topic_degrees() const {
  std::vector<std::size_t> out(topic_nodes.size(), 0);
  for (const auto& e : edges) ++out[e.topic];
  return out;
}

namespace {

void finish(BipartiteGraph& g) {
  std::sort(g.edges.begin(), g.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.topic, a.term) < std::tie(b.topic, b.term);
  });
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                            [](const auto& a, const auto& b) {
                              return a.topic == b.topic && a.term == b.term;
                            }),
                g.edges.end());
  for (const auto m : g.term_memberships()) {
    if (m == 0) throw Error(ErrorKind::kInvalidInput, "term node without an incident topic");
  }
}

}  // namespace

BipartiteGraph build_bipartite(const topicmodel::TermTopicMatrix& ttm) {
  if (ttm.topics.empty() || ttm.terms.empty()) {
    throw Error(ErrorKind::kInvalidInput, "term-topic matrix is empty");
  }
  BipartiteGraph g;
  g.topic_nodes = ttm.topics;
  g.term_nodes = ttm.terms;
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < g.term_nodes.size(); ++i) index[g.term_nodes[i]] = i;
  for (std::size_t slot = 0; slot < ttm.per_topic.size(); ++slot) {
    for (const auto& [term, w] : ttm.per_topic[slot]) g.edges.push_back({slot, index.at(term), w});
  }
  finish(g);
  return g;
}

BipartiteGraph from_memberships(
    std::size_t topics, const std::vector<std::pair<std::string, std::set<std::size_t>>>& terms) {
  BipartiteGraph g;
  for (std::size_t k = 0; k < topics; ++k) g.topic_nodes.push_back(k);
  auto sorted = terms;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    g.term_nodes.push_back(sorted[i].first);
    for (const auto k : sorted[i].second) {
      if (k >= topics) throw Error(ErrorKind::kInvalidInput, "topic id out of range");
      g.edges.push_back({k, i, 1.0});
    }
  }
  finish(g);
  return g;
}

BipartiteCentrality bipartite_degree(const BipartiteGraph& graph) {
  const auto K = static_cast<double>(graph.topic_nodes.size());
  const auto T = static_cast<double>(graph.term_nodes.size());
  BipartiteCentrality out;
  const auto topic_deg = graph.topic_degrees();
  for (std::size_t k = 0; k < graph.topic_nodes.size(); ++k) {
    out.rows.push_back({topic_label(graph.topic_nodes[k]), NodeMode::kTopic,
                        T > 0 ? static_cast<double>(topic_deg[k]) / T : 0.0, 0.0});
  }
  const auto memberships = graph.term_memberships();
  for (std::size_t t = 0; t < graph.term_nodes.size(); ++t) {
    out.rows.push_back(
        {graph.term_nodes[t], NodeMode::kTerm, static_cast<double>(memberships[t]) / K, 0.0});
  }
  return out;
}

BipartiteCentrality bipartite_closeness(const BipartiteGraph& graph, bool weighted) {
  const auto values = graph::closeness(graph.topology(), weighted);
  const auto K = graph.topic_nodes.size();
  BipartiteCentrality out;
  for (std::size_t k = 0; k < K; ++k) {
    out.rows.push_back({topic_label(graph.topic_nodes[k]), NodeMode::kTopic, 0.0, values[k]});
  }
  for (std::size_t t = 0; t < graph.term_nodes.size(); ++t) {
    out.rows.push_back({graph.term_nodes[t], NodeMode::kTerm, 0.0, values[K + t]});
  }
  return out;
}

BipartiteCentrality bipartite_centrality(const BipartiteGraph& graph, bool weighted) {
  auto table = bipartite_degree(graph);
  const auto close = bipartite_closeness(graph, weighted);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    table.rows[i].closeness_norm = close.rows[i].closeness_norm;
  }
  return table;
}

std::vector<BridgeTerm> bridge_terms(const BipartiteGraph& graph, std::size_t min_topics) {
  std::vector<BridgeTerm> out(graph.term_nodes.size());
  for (std::size_t t = 0; t < graph.term_nodes.size(); ++t) out[t].term = graph.term_nodes[t];
  for (const auto& e : graph.edges) out[e.term].topics.push_back(graph.topic_nodes[e.topic]);
  std::erase_if(out, [&](const BridgeTerm& b) { return b.topics.size() < min_topics; });
  std::stable_sort(out.begin(), out.end(), [](const BridgeTerm& a, const BridgeTerm& b) {
    if (a.topics.size() != b.topics.size()) return a.topics.size() > b.topics.size();
    return a.term < b.term;
  });
  return out;
}

graph::NetworkExport to_network(const BipartiteGraph& graph, const BipartiteCentrality& table) {
  graph::NetworkExport net;
  for (const auto& r : table.rows) {
    net.nodes.push_back(
        {r.node, r.mode == NodeMode::kTopic ? "topic" : "term", r.degree_norm, r.closeness_norm});
  }
  for (const auto& e : graph.edges) {
    net.edges.push_back({topic_label(graph.topic_nodes[e.topic]), graph.term_nodes[e.term],
                         e.weight});
  }
  return net;
}

}  // namespace cometa::topicnet
