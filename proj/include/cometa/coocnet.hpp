#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cometa/centrality.hpp"
#include "cometa/dtm.hpp"
#include "cometa/graph_io.hpp"

namespace cometa::coocnet {

enum class CoocMode {
  kBinary,  // number of documents containing both terms
  kCount,   // sum over documents of count(u) * count(v)
};

CoocMode parse_mode(std::string_view name);
std::string_view to_string(CoocMode mode);

/// Term co-occurrence graph over the DTM vocabulary. Each undirected pair is
/// stored once as (lower index, higher index); absent pairs have weight 0.
struct CoocGraph {
  std::vector<std::string> nodes;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> edges;
  CoocMode mode = CoocMode::kBinary;

  std::uint64_t weight(std::size_t u, std::size_t v) const;
  graph::UndirectedGraph topology() const;
};

struct CentralityRow {
  std::string node;
  double degree_norm = 0.0;
  double closeness_norm = 0.0;
};

struct CentralityTable {
  std::vector<CentralityRow> rows;  // in graph node order
};

/// Documents are the co-occurrence context. Pairs lighter than `min_weight`
/// are dropped.
CoocGraph cooccurrence(const dtm::DocumentTermMatrix& dtm, CoocMode mode,
                       std::uint64_t min_weight = 1);

/// deg(v) / (n - 1), ignoring weights. Needs at least two nodes.
std::map<std::string, double> degree_centrality(const CoocGraph& graph);

/// Component-scaled closeness on hop distances; isolated nodes score 0.
std::map<std::string, double> closeness_centrality(const CoocGraph& graph);

CentralityTable centrality_table(const CoocGraph& graph);

graph::NetworkExport to_network(const CoocGraph& graph, const CentralityTable& table);
std::string export_graph(const CoocGraph& graph, const CentralityTable& table,
                         graph::GraphFormat format);

/// Rebuilds a graph from an export. Weights must be positive integers.
CoocGraph import_graph(std::string_view text, graph::GraphFormat format,
                       CoocMode mode = CoocMode::kBinary);

}  // namespace cometa::coocnet
