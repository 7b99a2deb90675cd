#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cometa/centrality.hpp"
#include "cometa/graph_io.hpp"
#include "cometa/topicmodel.hpp"

namespace cometa::topicnet {

struct BipartiteEdge {
  std::size_t topic;
  std::size_t term;  // index into term_nodes
  double weight;     // phi[topic][term], display only unless asked otherwise
};

/// Two-mode topics-terms graph. Edges only ever join a topic to a term.
struct BipartiteGraph {
  std::vector<std::size_t> topic_nodes;
  std::vector<std::string> term_nodes;  // sorted
  std::vector<BipartiteEdge> edges;     // sorted by (topic, term)

  /// Node numbering used for path computations: topics first, then terms.
  graph::UndirectedGraph topology() const;
  std::vector<std::size_t> term_memberships() const;
  std::vector<std::size_t> topic_degrees() const;
};

enum class NodeMode { kTopic, kTerm };

struct CentralityRow {
  std::string node;
  NodeMode mode;
  double degree_norm = 0.0;
  double closeness_norm = 0.0;
};

/// Topic rows first (by topic id), then term rows (sorted by term).
struct BipartiteCentrality {
  std::vector<CentralityRow> rows;
};

/// Display name of a topic node, "Topic <k+1>". Terms never contain spaces,
/// so these names cannot collide with term nodes.
std::string topic_label(std::size_t topic);

BipartiteGraph build_bipartite(const topicmodel::TermTopicMatrix& ttm);

/// Builds a graph straight from topic memberships, for fixtures and imports.
BipartiteGraph from_memberships(std::size_t topics,
                                const std::vector<std::pair<std::string, std::set<std::size_t>>>& terms);

/// Two-mode degree: a term's incident topics over the topic count, a topic's
/// incident terms over the term count.
BipartiteCentrality bipartite_degree(const BipartiteGraph& graph);

/// Closeness on the bipartite graph, normalized as for co-occurrence
/// networks. With `weighted`, an edge has length 1 / phi.
BipartiteCentrality bipartite_closeness(const BipartiteGraph& graph, bool weighted = false);

/// Degree and closeness in one table.
BipartiteCentrality bipartite_centrality(const BipartiteGraph& graph, bool weighted = false);

struct BridgeTerm {
  std::string term;
  std::vector<std::size_t> topics;
};

/// Terms adjacent to at least `min_topics` topics, most-connected first and
/// ties broken by term.
std::vector<BridgeTerm> bridge_terms(const BipartiteGraph& graph, std::size_t min_topics = 2);

graph::NetworkExport to_network(const BipartiteGraph& graph, const BipartiteCentrality& table);

}  // namespace cometa::topicnet
