#include "cometa/graph_io.hpp"

#include <algorithm>
#include <set>

#include "cometa/digest.hpp"
#include "cometa/error.hpp"

namespace cometa::graph {

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [entity, c] : kEntities) {
        if (s.substr(i, entity.size()) == entity) {
          out += c;
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += s[i++];
  }
  return out;
}

double parse_number(std::string_view s) {
  try {
    return std::stod(std::string(s));
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidInput, "not a number: '" + std::string(s) + "'");
  }
}

// Value of attribute `name` inside a start tag.
std::optional<std::string> attribute(std::string_view tag, std::string_view name) {
  const std::string key = " " + std::string(name) + "=\"";
  const auto at = tag.find(key);
  if (at == std::string_view::npos) return std::nullopt;
  const auto begin = at + key.size();
  const auto end = tag.find('"', begin);
  if (end == std::string_view::npos) return std::nullopt;
  return xml_unescape(tag.substr(begin, end - begin));
}

bool two_mode(const NetworkExport& n) {
  return std::any_of(n.nodes.begin(), n.nodes.end(),
                     [](const NodeRecord& r) { return !r.mode.empty(); });
}

}  // namespace

GraphFormat parse_graph_format(std::string_view name) {
  if (name == "csv") return GraphFormat::kEdgeCsv;
  if (name == "graphml") return GraphFormat::kGraphMl;
  throw Error(ErrorKind::kConfiguration, "unknown graph format: '" + std::string(name) + "'");
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::string write_graph(const NetworkExport& network, GraphFormat format) {
  std::string out;
  if (format == GraphFormat::kEdgeCsv) {
    out = "source,target,weight\n";
    for (const auto& e : network.edges) {
      out += csv_field(e.source) + ',' + csv_field(e.target) + ',' + format_double(e.weight) +
             '\n';
    }
    return out;
  }
  out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"mode\" for=\"node\" attr.name=\"mode\" attr.type=\"string\"/>\n"
      "  <key id=\"degree\" for=\"node\" attr.name=\"degree\" attr.type=\"double\"/>\n"
      "  <key id=\"closeness\" for=\"node\" attr.name=\"closeness\" attr.type=\"double\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (const auto& n : network.nodes) {
    out += "    <node id=\"" + xml_escape(n.id) + "\">";
    if (!n.mode.empty()) out += "<data key=\"mode\">" + xml_escape(n.mode) + "</data>";
    out += "<data key=\"degree\">" + format_double(n.degree) + "</data>";
    out += "<data key=\"closeness\">" + format_double(n.closeness) + "</data></node>\n";
  }
  for (const auto& e : network.edges) {
    out += "    <edge source=\"" + xml_escape(e.source) + "\" target=\"" + xml_escape(e.target) +
           "\"><data key=\"weight\">" + format_double(e.weight) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

NetworkExport read_graph(std::string_view text, GraphFormat format) {
  NetworkExport net;
  if (format == GraphFormat::kEdgeCsv) {
    std::set<std::string> seen;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const auto line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (header || line.empty()) {
        header = false;
        continue;
      }
      const auto f = parse_csv_line(line);
      if (f.size() != 3) throw Error(ErrorKind::kInvalidInput, "bad edge row");
      net.edges.push_back({f[0], f[1], parse_number(f[2])});
      for (const auto& id : {f[0], f[1]}) {
        if (seen.insert(id).second) net.nodes.push_back({id, "", 0.0, 0.0});
      }
    }
    return net;
  }

  // Line-oriented reader for the layout write_graph emits.
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    auto data = [&](std::string_view key) -> std::optional<std::string> {
      const std::string open = "<data key=\"" + std::string(key) + "\">";
      const auto a = line.find(open);
      if (a == std::string_view::npos) return std::nullopt;
      const auto b = line.find("</data>", a);
      return xml_unescape(line.substr(a + open.size(), b - a - open.size()));
    };
    if (line.find("<node ") != std::string_view::npos) {
      NodeRecord n;
      n.id = attribute(line, "id").value_or("");
      n.mode = data("mode").value_or("");
      n.degree = parse_number(data("degree").value_or("0"));
      n.closeness = parse_number(data("closeness").value_or("0"));
      net.nodes.push_back(std::move(n));
    } else if (line.find("<edge ") != std::string_view::npos) {
      EdgeRecord e;
      e.source = attribute(line, "source").value_or("");
      e.target = attribute(line, "target").value_or("");
      e.weight = parse_number(data("weight").value_or("1"));
      net.edges.push_back(std::move(e));
    }
  }
  return net;
}

std::string write_centrality_csv(const NetworkExport& network) {
  const bool modes = two_mode(network);
  std::string out = modes ? "node,mode,degree,closeness\n" : "node,degree,closeness\n";
  for (const auto& n : network.nodes) {
    out += csv_field(n.id) + ',';
    if (modes) out += n.mode + ',';
    out += format_double(n.degree) + ',' + format_double(n.closeness) + '\n';
  }
  return out;
}

}  // namespace cometa::graph
