#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cometa/preprocess.hpp"

namespace cometa::dtm {

struct Entry {
  std::uint32_t term;
  std::uint32_t count;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse document-term counts in compressed-row form.
///
/// Invariants: `vocabulary` is sorted and unique; each row lists its entries
/// by ascending term index with count > 0; every term has at least one
/// non-zero entry. Documents without tokens stay as empty rows so the matrix
/// stays aligned with the document sequence it was built from.
struct DocumentTermMatrix {
  std::vector<std::string> doc_ids;
  std::vector<std::string> vocabulary;
  std::vector<std::size_t> row_offsets{0};  // size D + 1
  std::vector<Entry> entries;

  std::size_t num_docs() const { return doc_ids.size(); }
  std::size_t num_terms() const { return vocabulary.size(); }
  std::span<const Entry> row(std::size_t doc) const {
    return {entries.data() + row_offsets[doc], row_offsets[doc + 1] - row_offsets[doc]};
  }
  std::uint32_t count(std::size_t doc, std::size_t term) const;
  std::optional<std::size_t> term_index(std::string_view term) const;

  /// Indices of documents with no tokens.
  std::vector<std::size_t> zero_rows() const;
  /// Number of documents containing each term.
  std::vector<std::size_t> doc_counts() const;
  std::vector<std::uint64_t> total_counts() const;
  std::uint64_t total() const;

  friend bool operator==(const DocumentTermMatrix&, const DocumentTermMatrix&) = default;
};

struct TermFrequency {
  std::string term;
  std::uint64_t total_count = 0;
  std::size_t doc_count = 0;
  friend bool operator==(const TermFrequency&, const TermFrequency&) = default;
};

/// Throws an empty-corpus Error when no document has a token.
DocumentTermMatrix build_dtm(std::span<const preprocess::TokenizedDoc> docs);

/// Keeps term v iff 1 - doc_count(v)/D <= max_sparsity. Throws a
/// configuration Error when max_sparsity is outside (0, 1] or when nothing
/// survives.
DocumentTermMatrix trim_sparse(const DocumentTermMatrix& dtm, double max_sparsity);

/// Minimum number of documents a term must appear in to survive trimming.
std::size_t min_doc_count(std::size_t num_docs, double max_sparsity);

/// Sorted by total_count descending, then term ascending.
std::vector<TermFrequency> term_frequencies(const DocumentTermMatrix& dtm);
std::vector<TermFrequency> top_terms(const DocumentTermMatrix& dtm, std::size_t n);

/// Sparse triplet export: `doc_id<TAB>term<TAB>count` per non-zero entry.
std::string write_triplets(const DocumentTermMatrix& dtm);
/// Vocabulary sidecar, one term per line in index order.
std::string write_vocabulary(const DocumentTermMatrix& dtm);

}  // namespace cometa::dtm
