#include "cometa/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cometa/digest.hpp"
#include "cometa/error.hpp"

namespace cometa::sentiment {

LoadedLexicon load_lexicon(const std::filesystem::path& path, const std::string& language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot read lexicon " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_lexicon(ss.str(), language);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

LoadedLexicon parse_lexicon(std::string_view text, const std::string& language) {
  LoadedLexicon out;
  out.lexicon.language = language;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    const auto where = "line " + std::to_string(line_no);
    if (tab == std::string_view::npos) {
      throw Error(ErrorKind::kConfiguration, where + ": expected term<TAB>polarity");
    }
    const auto term = preprocess::normalize_term(line.substr(0, tab));
    const auto value = line.substr(tab + 1);
    int polarity = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), polarity);
    if (term.empty() || res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
      throw Error(ErrorKind::kConfiguration, where + ": malformed entry");
    }
    if (polarity < kMinPolarity || polarity > kMaxPolarity) {
      out.warnings.push_back(where + ": polarity " + std::to_string(polarity) +
                             " out of range for '" + term + "', line skipped");
      continue;
    }
    const auto [it, inserted] = out.lexicon.entries.insert_or_assign(term, polarity);
    if (!inserted) {
      out.warnings.push_back(where + ": duplicate term '" + term + "', last value kept");
    }
  }
  if (out.lexicon.entries.empty()) {
    throw Error(ErrorKind::kConfiguration, "lexicon has no usable entries");
  }
  return out;
}

DocumentScore score_document(std::span<const std::string> tokens, const Lexicon& lexicon) {
  DocumentScore s;
  for (const auto& t : tokens) {
    const auto it = lexicon.entries.find(t);
    if (it == lexicon.entries.end()) continue;
    s.score += it->second;
    ++s.matched;
  }
  return s;
}

SentimentSeries sentiment_series(std::span<const preprocess::TokenizedDoc> docs,
                                 const Lexicon& lexicon, Bucket /*bucket*/) {
  // Integer totals per day keep the fold exact and order independent.
  std::map<Date, std::pair<std::int64_t, std::size_t>> by_day;
  for (const auto& d : docs) {
    auto& slot = by_day[d.published_at];
    slot.first += score_document(d.tokens, lexicon).score;
    ++slot.second;
  }
  SentimentSeries series;
  series.points.reserve(by_day.size());
  for (const auto& [date, agg] : by_day) {
    const auto total = static_cast<double>(agg.first);
    series.points.push_back({date, total / static_cast<double>(agg.second), agg.second, total});
  }
  return series;
}

std::vector<Date> find_peaks(const SentimentSeries& series, std::size_t window,
                             double min_prominence) {
  const auto& pts = series.points;
  std::vector<Date> peaks;
  if (pts.size() < 3 || window == 0) return peaks;
  double mean_abs = 0.0;
  for (const auto& p : pts) mean_abs += std::abs(p.mean_polarity);
  mean_abs /= static_cast<double>(pts.size());

  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double value = std::abs(pts[i].mean_polarity);
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(pts.size() - 1, i + window);
    bool strict_max = true;
    for (std::size_t j = lo; j <= hi && strict_max; ++j) {
      if (j != i && std::abs(pts[j].mean_polarity) >= value) strict_max = false;
    }
    if (strict_max && value - mean_abs >= min_prominence) peaks.push_back(pts[i].date);
  }
  return peaks;
}

std::string write_series_csv(const SentimentSeries& series) {
  std::string out = "date,mean,docs,total\n";
  for (const auto& p : series.points) {
    out += p.date.to_string() + ',' + format_double(p.mean_polarity) + ',' +
           std::to_string(p.doc_count) + ',' + format_double(p.total_polarity) + '\n';
  }
  return out;
}

}  // namespace cometa::sentiment
