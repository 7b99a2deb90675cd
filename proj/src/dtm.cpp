#include "cometa/dtm.hpp"

#include <algorithm>
#include <cmath>

#include "cometa/error.hpp"

namespace cometa::dtm {

std::uint32_t DocumentTermMatrix::count(std::size_t doc, std::size_t term) const {
  const auto r = row(doc);
  const auto it = std::lower_bound(r.begin(), r.end(), term,
                                   [](const Entry& e, std::size_t t) { return e.term < t; });
  return (it != r.end() && it->term == term) ? it->count : 0;
}

std::optional<std::size_t> DocumentTermMatrix::term_index(std::string_view term) const {
  const auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), term);
  if (it == vocabulary.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - vocabulary.begin());
}

std::vector<std::size_t> DocumentTermMatrix::zero_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < num_docs(); ++d) {
    if (row_offsets[d] == row_offsets[d + 1]) out.push_back(d);
  }
  return out;
}

std::vector<std::size_t> DocumentTermMatrix::doc_counts() const {
  std::vector<std::size_t> out(num_terms(), 0);
  for (const auto& e : entries) ++out[e.term];
  return out;
}

std::vector<std::uint64_t> DocumentTermMatrix::total_counts() const {
  std::vector<std::uint64_t> out(num_terms(), 0);
  for (const auto& e : entries) out[e.term] += e.count;
  return out;
}

std::uint64_t DocumentTermMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries) sum += e.count;
  return sum;
}

DocumentTermMatrix build_dtm(std::span<const preprocess::TokenizedDoc> docs) {
  DocumentTermMatrix m;
  std::vector<std::string> vocab;
  for (const auto& d : docs) vocab.insert(vocab.end(), d.tokens.begin(), d.tokens.end());
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  if (vocab.empty()) {
    throw Error(ErrorKind::kEmptyCorpus, "every document is empty after preprocessing");
  }
  std::unordered_map<std::string_view, std::uint32_t> index;
  index.reserve(vocab.size());
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    index.emplace(vocab[v], static_cast<std::uint32_t>(v));
  }

  std::vector<std::uint32_t> ids;
  for (const auto& d : docs) {
    m.doc_ids.push_back(d.article_id);
    ids.clear();
    for (const auto& t : d.tokens) ids.push_back(index.at(t));
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size();) {
      std::size_t j = i;
      while (j < ids.size() && ids[j] == ids[i]) ++j;
      m.entries.push_back({ids[i], static_cast<std::uint32_t>(j - i)});
      i = j;
    }
    m.row_offsets.push_back(m.entries.size());
  }
  m.vocabulary = std::move(vocab);
  return m;
}

std::size_t min_doc_count(std::size_t num_docs, double max_sparsity) {
  // The small slack absorbs representation error, e.g. (1 - 0.8) * 10.
  const double needed = (1.0 - max_sparsity) * static_cast<double>(num_docs);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(needed - 1e-9)));
}

DocumentTermMatrix trim_sparse(const DocumentTermMatrix& dtm, double max_sparsity) {
  if (!(max_sparsity > 0.0 && max_sparsity <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "max_sparsity must be in (0, 1]");
  }
  const auto threshold = min_doc_count(dtm.num_docs(), max_sparsity);
  const auto counts = dtm.doc_counts();

  std::vector<std::int64_t> remap(dtm.num_terms(), -1);
  DocumentTermMatrix out;
  for (std::size_t v = 0; v < dtm.num_terms(); ++v) {
    if (counts[v] >= threshold) {
      remap[v] = static_cast<std::int64_t>(out.vocabulary.size());
      out.vocabulary.push_back(dtm.vocabulary[v]);
    }
  }
  if (out.vocabulary.empty()) {
    throw Error(ErrorKind::kConfiguration,
                "max_sparsity " + std::to_string(max_sparsity) +
                    " removes every term; use a larger threshold");
  }
  out.doc_ids = dtm.doc_ids;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    for (const auto& e : dtm.row(d)) {
      if (remap[e.term] >= 0) {
        out.entries.push_back({static_cast<std::uint32_t>(remap[e.term]), e.count});
      }
    }
    out.row_offsets.push_back(out.entries.size());
  }
  return out;
}

std::vector<TermFrequency> term_frequencies(const DocumentTermMatrix& dtm) {
  const auto totals = dtm.total_counts();
  const auto docs = dtm.doc_counts();
  std::vector<TermFrequency> out;
  out.reserve(dtm.num_terms());
  for (std::size_t v = 0; v < dtm.num_terms(); ++v) {
    out.push_back({dtm.vocabulary[v], totals[v], docs[v]});
  }
  std::sort(out.begin(), out.end(), [](const TermFrequency& a, const TermFrequency& b) {
    if (a.total_count != b.total_count) return a.total_count > b.total_count;
    return a.term < b.term;
  });
  return out;
}

std::vector<TermFrequency> top_terms(const DocumentTermMatrix& dtm, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::kConfiguration, "top_terms needs n >= 1");
  auto all = term_frequencies(dtm);
  if (all.size() > n) all.resize(n);
  return all;
}

std::string write_triplets(const DocumentTermMatrix& dtm) {
  std::string out;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    for (const auto& e : dtm.row(d)) {
      out += dtm.doc_ids[d];
      out += '\t';
      out += dtm.vocabulary[e.term];
      out += '\t';
      out += std::to_string(e.count);
      out += '\n';
    }
  }
  return out;
}

std::string write_vocabulary(const DocumentTermMatrix& dtm) {
  std::string out;
  for (const auto& t : dtm.vocabulary) {
    out += t;
    out += '\n';
  }
  return out;
}

}  // namespace cometa::dtm
