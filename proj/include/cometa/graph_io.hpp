#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cometa::graph {

struct NodeRecord {
  std::string id;
  std::string mode;  // "term" or "topic"; empty for one-mode graphs
  double degree = 0.0;
  double closeness = 0.0;
  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct EdgeRecord {
  std::string source;
  std::string target;
  double weight = 1.0;
  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// A graph with centralities attached, in the shape it is written to disk.
struct NetworkExport {
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  friend bool operator==(const NetworkExport&, const NetworkExport&) = default;
};

enum class GraphFormat { kEdgeCsv, kGraphMl };

/// "csv" or "graphml"; anything else is a configuration Error.
GraphFormat parse_graph_format(std::string_view name);

/// Edge-list CSV (`source,target,weight`) or GraphML with node attributes.
std::string write_graph(const NetworkExport& network, GraphFormat format);

/// Reads what write_graph produced. The edge-list form carries no node
/// attributes, so nodes are recovered from edge endpoints only.
NetworkExport read_graph(std::string_view text, GraphFormat format);

/// `node,degree,closeness`, plus a `mode` column for two-mode graphs.
std::string write_centrality_csv(const NetworkExport& network);

std::string csv_field(std::string_view value);
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace cometa::graph
