#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cometa/corpus_store.hpp"
#include "cometa/date.hpp"

namespace cometa::preprocess {

struct PreprocessConfig {
  std::string language = "en";
  bool lowercase = true;
  bool strip_punctuation = true;
  bool strip_digits = true;
  std::size_t min_token_len = 2;  // in code points
  std::set<std::string> stopwords;
  std::set<std::string> extra_stopwords;
  /// Optional normalization hook applied to surviving tokens. Off by default;
  /// the shipped vocabularies are surface forms.
  std::function<std::string(std::string_view)> stemmer;

  /// Defaults for `language` with its bundled stopword list.
  static PreprocessConfig for_language(const std::string& language);

  /// Throws a configuration Error if min_token_len is 0 or a stopword is not
  /// in normalized form.
  void validate() const;
  bool is_stopword(const std::string& term) const {
    return stopwords.contains(term) || extra_stopwords.contains(term);
  }
};

struct TokenizedDoc {
  std::string article_id;
  std::vector<std::string> tokens;
  Date published_at;
  std::string language;
};

/// Bundled stopword list for `en` or `it`; throws a configuration Error for
/// any other language.
std::set<std::string> load_stopwords(std::string_view language);

/// One term per line, `#` starts a comment. Terms are normalized on load.
std::set<std::string> load_stopwords_file(const std::filesystem::path& path);

/// Edge punctuation stripping plus case folding: the canonical form of a
/// single term, as used for stopwords and lexicon entries.
std::string normalize_term(std::string_view term, bool lowercase = true);

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config);

/// Title and body are joined before tokenization. Every article must be in
/// `config.language`.
std::vector<TokenizedDoc> preprocess_corpus(const corpus::CorpusView& view,
                                            const PreprocessConfig& config);

}  // namespace cometa::preprocess
