#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cometa/date.hpp"
#include "cometa/preprocess.hpp"

namespace cometa::sentiment {

inline constexpr int kMinPolarity = -5;
inline constexpr int kMaxPolarity = 5;

struct Lexicon {
  std::string language;
  std::map<std::string, int> entries;  // normalized term -> polarity
};

struct LoadedLexicon {
  Lexicon lexicon;
  std::vector<std::string> warnings;
};

/// Reads `term<TAB>polarity` lines (`#` comments and blank lines allowed).
/// A repeated term keeps its last value; polarities outside [-5, 5] drop the
/// line. Both emit a warning. An empty result or an unparseable line is a
/// configuration Error.
LoadedLexicon load_lexicon(const std::filesystem::path& path, const std::string& language);
LoadedLexicon parse_lexicon(std::string_view text, const std::string& language);

struct DocumentScore {
  std::int64_t score = 0;
  std::size_t matched = 0;
  friend bool operator==(const DocumentScore&, const DocumentScore&) = default;
};

DocumentScore score_document(std::span<const std::string> tokens, const Lexicon& lexicon);

struct SeriesPoint {
  Date date;
  double mean_polarity = 0.0;
  std::size_t doc_count = 0;
  double total_polarity = 0.0;
  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Dated points in strictly increasing order; days without documents are
/// omitted.
struct SentimentSeries {
  std::vector<SeriesPoint> points;
};

enum class Bucket { kDay };

/// Each point is the mean of the document scores published that day.
SentimentSeries sentiment_series(std::span<const preprocess::TokenizedDoc> docs,
                                 const Lexicon& lexicon, Bucket bucket = Bucket::kDay);

/// Interior points whose |mean| is the strict maximum of |mean| within
/// `window` points on either side (clipped at the ends) and exceeds the
/// average |mean| of the series by at least `min_prominence`.
std::vector<Date> find_peaks(const SentimentSeries& series, std::size_t window,
                             double min_prominence);

/// `date,mean,docs,total` with a header row.
std::string write_series_csv(const SentimentSeries& series);

}  // namespace cometa::sentiment
