#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cometa/date.hpp"

namespace cometa::corpus {

struct Article {
  std::string id;
  std::string source;
  std::string language;  // ISO-639-1
  Date published_at;
  std::string title;
  std::string body;

  friend bool operator==(const Article&, const Article&) = default;
};

/// Normalized single-line JSON form used by both ingestion and export.
std::string to_jsonl(const Article& article);

struct Rejection {
  std::size_t record = 0;  // 0-based position in the submitted batch
  std::string id;          // empty when the record had no usable id
  std::string reason;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<Rejection> rejections;
};

/// Closed interval; a missing end is unbounded.
struct DateInterval {
  std::optional<Date> from;
  std::optional<Date> to;

  bool contains(Date d) const {
    return (!from || *from <= d) && (!to || d <= *to);
  }
  friend bool operator==(const DateInterval&, const DateInterval&) = default;
};

/// Empty facets impose no constraint.
struct CorpusFilter {
  std::set<std::string> sources;
  std::set<std::string> languages;
  DateInterval dates;

  bool matches(const Article& a) const;
  friend bool operator==(const CorpusFilter&, const CorpusFilter&) = default;
};

using ArticleList = std::vector<Article>;

/// Immutable snapshot of the articles of one corpus that matched a filter,
/// ordered by (published_at, id). Safe to share across threads.
class CorpusView {
 public:
  CorpusView(std::string corpus_id, CorpusFilter filter,
             std::shared_ptr<const ArticleList> articles);

  const std::string& corpus_id() const { return corpus_id_; }
  const CorpusFilter& filter() const { return filter_; }
  const ArticleList& articles() const { return *articles_; }
  std::vector<std::string> article_ids() const;
  std::size_t size() const { return articles_->size(); }
  bool empty() const { return articles_->empty(); }

  /// SHA-256 over the normalized records, in view order.
  std::string digest() const;

 private:
  std::string corpus_id_;
  CorpusFilter filter_;
  std::shared_ptr<const ArticleList> articles_;
};

/// Narrows an existing view. Filtering twice with the same facets is a no-op.
CorpusView filter_view(const CorpusView& view, const CorpusFilter& filter);

struct CorpusStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_language;
  std::map<std::string, std::size_t> by_source;
  std::optional<std::pair<Date, Date>> date_range;
};

CorpusStats stats_of(const CorpusView& view);

/// Parses one ingestion record. On failure returns nullopt and sets `reason`.
std::optional<Article> parse_record(std::string_view line,
                                    const std::set<std::string>& languages,
                                    std::string& reason);

/// File-backed corpus collection rooted at a data directory.
///
/// Layout: `<root>/corpora/<id>/articles.jsonl` is append-only and holds one
/// normalized record per line; `index.tsv` next to it is derived data and is
/// rebuilt whenever it is missing or stale. A trailing line without a newline
/// (an interrupted append) is ignored on read and truncated by the next writer.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root,
                       std::set<std::string> languages = {"en", "it"});

  const std::filesystem::path& root() const { return root_; }
  const std::set<std::string>& languages() const { return languages_; }

  /// Validates and appends `records` (one JSON object each). Creates the
  /// corpus if needed. Throws a retryable Error if another writer holds the
  /// corpus lock.
  IngestReport ingest_documents(std::span<const std::string> records,
                                const std::string& corpus_id);

  CorpusView filter_corpus(const std::string& corpus_id,
                           const CorpusFilter& filter = {}) const;
  CorpusStats corpus_stats(const std::string& corpus_id) const;

  bool exists(const std::string& corpus_id) const;
  std::vector<std::string> list_corpora() const;

  /// Every record of the corpus, normalized, ordered by (published_at, id).
  std::string export_jsonl(const std::string& corpus_id) const;

 private:
  struct IndexEntry {
    std::string id;
    Date published_at;
    std::string source;
    std::string language;
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
  };
  struct Loaded {
    std::uint64_t data_bytes = 0;
    std::shared_ptr<const std::vector<IndexEntry>> index;
  };

  std::filesystem::path corpus_dir(const std::string& corpus_id) const;
  std::shared_ptr<const std::vector<IndexEntry>> load_index(
      const std::string& corpus_id) const;
  ArticleList read_articles(const std::string& corpus_id,
                            std::span<const IndexEntry> entries) const;

  std::filesystem::path root_;
  std::set<std::string> languages_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, Loaded> cache_;
};

/// Corpus ids become directory names: `[A-Za-z0-9._-]+`, not starting with '.'.
bool valid_corpus_id(std::string_view id);

}  // namespace cometa::corpus
