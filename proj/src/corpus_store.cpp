#include "cometa/corpus_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cometa/digest.hpp"
#include "cometa/error.hpp"

namespace cometa::corpus {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kDataFile = "articles.jsonl";
constexpr std::string_view kIndexFile = "index.tsv";
constexpr std::string_view kLockFile = ".lock";
constexpr std::string_view kIndexHeader = "#cometa-index v1 ";

bool has_control_separator(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Exclusive, non-blocking advisory lock on a corpus directory.
class CorpusLock {
 public:
  explicit CorpusLock(const fs::path& dir) {
    const auto path = dir / kLockFile;
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw Error(ErrorKind::kIo, "cannot open lock file " + path.string() +
                                      ": " + std::strerror(errno));
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw Error(ErrorKind::kRetryable,
                  "corpus is locked by another writer: " + dir.filename().string());
    }
  }
  ~CorpusLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  CorpusLock(const CorpusLock&) = delete;
  CorpusLock& operator=(const CorpusLock&) = delete;

 private:
  int fd_ = -1;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

void append_durably(const fs::path& path, std::string_view data) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::size_t written = 0;
  while (written < data.size()) {
    const auto n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string msg = std::strerror(errno);
      ::close(fd);
      throw Error(ErrorKind::kIo, "append to " + path.string() + " failed: " + msg);
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

std::string to_jsonl(const Article& a) {
  ojson j;
  j["id"] = a.id;
  j["source"] = a.source;
  j["language"] = a.language;
  j["published_at"] = a.published_at.to_string();
  j["title"] = a.title;
  j["body"] = a.body;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

bool CorpusFilter::matches(const Article& a) const {
  if (!sources.empty() && !sources.contains(a.source)) return false;
  if (!languages.empty() && !languages.contains(a.language)) return false;
  return dates.contains(a.published_at);
}

CorpusView::CorpusView(std::string corpus_id, CorpusFilter filter,
                       std::shared_ptr<const ArticleList> articles)
    : corpus_id_(std::move(corpus_id)),
      filter_(std::move(filter)),
      articles_(articles ? std::move(articles) : std::make_shared<const ArticleList>()) {}

std::vector<std::string> CorpusView::article_ids() const {
  std::vector<std::string> ids;
  ids.reserve(articles_->size());
  for (const auto& a : *articles_) ids.push_back(a.id);
  return ids;
}

std::string CorpusView::digest() const {
  std::string all;
  for (const auto& a : *articles_) {
    all += to_jsonl(a);
    all += '\n';
  }
  return sha256_hex(all);
}

CorpusView filter_view(const CorpusView& view, const CorpusFilter& filter) {
  auto kept = std::make_shared<ArticleList>();
  for (const auto& a : view.articles()) {
    if (filter.matches(a)) kept->push_back(a);
  }
  return CorpusView(view.corpus_id(), filter, std::move(kept));
}

CorpusStats stats_of(const CorpusView& view) {
  CorpusStats stats;
  for (const auto& a : view.articles()) {
    ++stats.total;
    ++stats.by_language[a.language];
    ++stats.by_source[a.source];
    if (!stats.date_range) {
      stats.date_range.emplace(a.published_at, a.published_at);
    } else {
      stats.date_range->first = std::min(stats.date_range->first, a.published_at);
      stats.date_range->second = std::max(stats.date_range->second, a.published_at);
    }
  }
  return stats;
}

std::optional<Article> parse_record(std::string_view line,
                                    const std::set<std::string>& languages,
                                    std::string& reason) {
  const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    reason = "malformed record";
    return std::nullopt;
  }
  Article a;
  auto field = [&](const char* name, std::string& out, bool required) {
    const auto it = j.find(name);
    if (it == j.end() || it->is_null()) {
      if (required) reason = std::string("missing field: ") + name;
      return !required;
    }
    if (!it->is_string()) {
      reason = std::string("field is not a string: ") + name;
      return false;
    }
    out = it->get<std::string>();
    return true;
  };
  std::string date_text;
  if (!field("id", a.id, true) || !field("source", a.source, true) ||
      !field("language", a.language, true) ||
      !field("published_at", date_text, true) || !field("title", a.title, false) ||
      !field("body", a.body, false)) {
    return std::nullopt;
  }
  if (a.id.empty() || has_control_separator(a.id)) {
    reason = "bad id";
    return std::nullopt;
  }
  if (a.source.empty() || has_control_separator(a.source)) {
    reason = "bad source";
    return std::nullopt;
  }
  a.language = lower_ascii(a.language);
  if (!languages.contains(a.language)) {
    reason = "unsupported language";
    return std::nullopt;
  }
  const auto date = Date::parse(date_text);
  if (!date) {
    reason = "bad date";
    return std::nullopt;
  }
  if (*date < Date(1900, 1, 1) || *date > Date::today() + 1) {
    reason = "date out of range";
    return std::nullopt;
  }
  a.published_at = *date;
  if (a.title.empty() && a.body.empty()) {
    reason = "empty text";
    return std::nullopt;
  }
  return a;
}

bool valid_corpus_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
  });
}

CorpusStore::CorpusStore(fs::path root, std::set<std::string> languages)
    : root_(std::move(root)), languages_(std::move(languages)) {}

fs::path CorpusStore::corpus_dir(const std::string& corpus_id) const {
  if (!valid_corpus_id(corpus_id)) {
    throw Error(ErrorKind::kInvalidInput, "invalid corpus id: '" + corpus_id + "'");
  }
  return root_ / "corpora" / corpus_id;
}

bool CorpusStore::exists(const std::string& corpus_id) const {
  return valid_corpus_id(corpus_id) &&
         fs::exists(root_ / "corpora" / corpus_id / kDataFile);
}

std::vector<std::string> CorpusStore::list_corpora() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "corpora", ec)) {
    const auto name = entry.path().filename().string();
    if (entry.is_directory() && exists(name)) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

// Index rows for every complete line of the data file.
template <typename Entry>
std::vector<Entry> scan_data(std::string_view data, const std::set<std::string>& languages) {
  std::vector<Entry> entries;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) break;  // interrupted append
    const auto line = data.substr(pos, nl - pos);
    std::string reason;
    if (auto a = parse_record(line, languages, reason)) {
      entries.push_back(Entry{a->id, a->published_at, a->source, a->language, pos,
                              static_cast<std::uint64_t>(line.size())});
    }
    pos = nl + 1;
  }
  return entries;
}

}  // namespace

std::shared_ptr<const std::vector<CorpusStore::IndexEntry>> CorpusStore::load_index(
    const std::string& corpus_id) const {
  const auto dir = corpus_dir(corpus_id);
  const auto data_path = dir / kDataFile;
  std::error_code ec;
  const auto data_bytes = fs::file_size(data_path, ec);
  if (ec) throw Error(ErrorKind::kNotFound, "unknown corpus: " + corpus_id);

  {
    std::lock_guard lock(cache_mutex_);
    const auto it = cache_.find(corpus_id);
    if (it != cache_.end() && it->second.data_bytes == data_bytes) return it->second.index;
  }

  auto entries = std::make_shared<std::vector<IndexEntry>>();
  std::uint64_t indexed_bytes = 0;
  bool index_ok = false;
  {
    std::ifstream in(dir / kIndexFile);
    std::string header;
    if (in && std::getline(in, header) && header.starts_with(kIndexHeader)) {
      indexed_bytes = std::stoull(header.substr(kIndexHeader.size()));
      index_ok = true;
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream row(line);
        IndexEntry e;
        std::string date;
        if (!std::getline(row, e.id, '\t') || !std::getline(row, date, '\t') ||
            !std::getline(row, e.source, '\t') || !std::getline(row, e.language, '\t') ||
            !(row >> e.offset >> e.length)) {
          index_ok = false;
          break;
        }
        const auto d = Date::parse(date);
        if (!d) {
          index_ok = false;
          break;
        }
        e.published_at = *d;
        entries->push_back(std::move(e));
      }
    }
  }
  // The index may lag behind a completed append or be missing altogether; any
  // data after the last newline is an interrupted write and is not indexed.
  if (!index_ok || indexed_bytes > data_bytes) {
    entries->clear();
    const auto data = read_file(data_path);
    *entries = scan_data<IndexEntry>(data, languages_);
  } else if (indexed_bytes < data_bytes) {
    const auto data = read_file(data_path);
    auto tail = scan_data<IndexEntry>(std::string_view(data).substr(indexed_bytes), languages_);
    for (auto& e : tail) {
      e.offset += indexed_bytes;
      entries->push_back(std::move(e));
    }
  }
  std::stable_sort(entries->begin(), entries->end(), [](const auto& a, const auto& b) {
    if (a.published_at != b.published_at) return a.published_at < b.published_at;
    return a.id < b.id;
  });

  std::shared_ptr<const std::vector<IndexEntry>> result = std::move(entries);
  std::lock_guard lock(cache_mutex_);
  cache_[corpus_id] = Loaded{data_bytes, result};
  return result;
}

ArticleList CorpusStore::read_articles(const std::string& corpus_id,
                                                    std::span<const IndexEntry> entries) const {
  ArticleList out;
  out.reserve(entries.size());
  std::ifstream in(corpus_dir(corpus_id) / kDataFile, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read corpus " + corpus_id);
  std::string line;
  for (const auto& e : entries) {
    line.resize(e.length);
    in.seekg(static_cast<std::streamoff>(e.offset));
    in.read(line.data(), static_cast<std::streamsize>(e.length));
    std::string reason;
    auto a = parse_record(line, languages_, reason);
    if (!in || !a || a->id != e.id) {
      throw Error(ErrorKind::kIo, "corpus index out of sync for " + corpus_id +
                                      " at record " + e.id);
    }
    out.push_back(std::move(*a));
  }
  return out;
}

CorpusView CorpusStore::filter_corpus(const std::string& corpus_id,
                                      const CorpusFilter& filter) const {
  const auto index = load_index(corpus_id);
  std::vector<IndexEntry> selected;
  for (const auto& e : *index) {
    if (!filter.sources.empty() && !filter.sources.contains(e.source)) continue;
    if (!filter.languages.empty() && !filter.languages.contains(e.language)) continue;
    if (!filter.dates.contains(e.published_at)) continue;
    selected.push_back(e);
  }
  auto articles = std::make_shared<const ArticleList>(read_articles(corpus_id, selected));
  return CorpusView(corpus_id, filter, std::move(articles));
}

CorpusStats CorpusStore::corpus_stats(const std::string& corpus_id) const {
  const auto index = load_index(corpus_id);
  CorpusStats stats;
  for (const auto& e : *index) {
    ++stats.total;
    ++stats.by_language[e.language];
    ++stats.by_source[e.source];
    if (!stats.date_range) {
      stats.date_range.emplace(e.published_at, e.published_at);
    } else {
      stats.date_range->first = std::min(stats.date_range->first, e.published_at);
      stats.date_range->second = std::max(stats.date_range->second, e.published_at);
    }
  }
  return stats;
}

std::string CorpusStore::export_jsonl(const std::string& corpus_id) const {
  const auto view = filter_corpus(corpus_id);
  std::string out;
  for (const auto& a : view.articles()) {
    out += to_jsonl(a);
    out += '\n';
  }
  return out;
}

IngestReport CorpusStore::ingest_documents(std::span<const std::string> records,
                                           const std::string& corpus_id) {
  const auto dir = corpus_dir(corpus_id);
  fs::create_directories(dir);
  CorpusLock lock(dir);

  const auto data_path = dir / kDataFile;
  if (!fs::exists(data_path)) std::ofstream(data_path, std::ios::binary);

  // Drop an interrupted trailing append before adding to the file.
  {
    const auto data = read_file(data_path);
    const auto last_nl = data.rfind('\n');
    const std::size_t complete = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (complete != data.size()) fs::resize_file(data_path, complete);
  }

  const auto existing = load_index(corpus_id);
  std::unordered_set<std::string> seen;
  for (const auto& e : *existing) seen.insert(e.id);

  IngestReport report;
  std::string batch;
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::string reason;
    auto article = parse_record(records[i], languages_, reason);
    if (article && !seen.insert(article->id).second) reason = "duplicate id";
    if (!article || reason == "duplicate id") {
      std::string id;
      if (article) {
        id = article->id;
      } else {
        const auto j = nlohmann::json::parse(records[i], nullptr, false);
        if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"];
      }
      report.rejections.push_back({i, std::move(id), std::move(reason)});
      ++report.rejected;
      continue;
    }
    batch += to_jsonl(*article);
    batch += '\n';
    ++report.accepted;
  }

  if (!batch.empty()) append_durably(data_path, batch);

  // Refresh the derived index so readers do not rescan.
  const auto refreshed = load_index(corpus_id);
  std::string index = std::string(kIndexHeader) + std::to_string(fs::file_size(data_path)) + "\n";
  std::vector<IndexEntry> by_offset(refreshed->begin(), refreshed->end());
  std::sort(by_offset.begin(), by_offset.end(),
            [](const auto& a, const auto& b) { return a.offset < b.offset; });
  for (const auto& e : by_offset) {
    index += e.id + '\t' + e.published_at.to_string() + '\t' + e.source + '\t' + e.language +
             '\t' + std::to_string(e.offset) + '\t' + std::to_string(e.length) + '\n';
  }
  write_file_atomic(dir / kIndexFile, index);
  return report;
}

}  // namespace cometa::corpus
