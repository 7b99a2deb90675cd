#include "cometa/preprocess.hpp"

#include <algorithm>
#include <fstream>

#include "cometa/error.hpp"

namespace cometa::preprocess {

// Defined in stopwords.cpp.
std::span<const std::string_view> bundled_stopwords(std::string_view language);

namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;  // byte offsets into the source
};

// Lenient UTF-8 decoding: an invalid byte becomes U+FFFD of length 1.
std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (b0 < 0x80) {
      cp = b0;
    } else {
      std::size_t need = 0;
      if ((b0 & 0xE0) == 0xC0) {
        need = 1;
        cp = b0 & 0x1F;
      } else if ((b0 & 0xF0) == 0xE0) {
        need = 2;
        cp = b0 & 0x0F;
      } else if ((b0 & 0xF8) == 0xF0) {
        need = 3;
        cp = b0 & 0x07;
      }
      bool ok = need > 0;
      for (std::size_t k = 1; ok && k <= need; ++k) {
        if (i + k >= s.size()) {
          ok = false;
          break;
        }
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) ok = false;
        cp = (cp << 6) | (b & 0x3F);
      }
      if (ok) {
        len = need + 1;
      } else {
        cp = 0xFFFD;
      }
    }
    out.push_back({cp, i, i + len});
    i += len;
  }
  return out;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t c) {
  return c == ' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB ||
         c == 0xBF || (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) ||
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011);
}

bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

// Simple one-to-one case folding for Latin-1, Latin Extended-A, Greek and
// Cyrillic. Idempotent: folding a folded code point is a no-op.
char32_t fold(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 32;
  if (c >= 0x100 && c <= 0x137) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

// Applies edge stripping and folding to one whitespace-delimited chunk.
// Returns false when nothing is left.
bool normalize_chunk(std::span<const CodePoint> cps, std::string_view src, bool strip,
                     bool lowercase, std::string& out, std::size_t& length,
                     bool& numeric) {
  std::size_t first = 0;
  std::size_t last = cps.size();
  if (strip) {
    while (first < last && is_punct(cps[first].value)) ++first;
    while (last > first && is_punct(cps[last - 1].value)) --last;
  }
  if (first == last) return false;
  out.clear();
  bool any_digit = false;
  numeric = true;
  for (std::size_t i = first; i < last; ++i) {
    const char32_t c = cps[i].value;
    if (is_digit(c)) {
      any_digit = true;
    } else if (!is_punct(c)) {
      numeric = false;
    }
    if (lowercase) {
      encode(fold(c), out);
    } else if (c == 0xFFFD) {
      encode(c, out);
    } else {
      out.append(src.substr(cps[i].begin, cps[i].end - cps[i].begin));
    }
  }
  numeric = numeric && any_digit;
  length = last - first;
  return true;
}

}  // namespace

std::string normalize_term(std::string_view term, bool lowercase) {
  const auto cps = decode(term);
  std::string out;
  std::size_t length = 0;
  bool numeric = false;
  // Only the outer edges matter for a single term; inner whitespace is kept.
  if (!normalize_chunk(cps, term, true, lowercase, out, length, numeric)) return {};
  return out;
}

PreprocessConfig PreprocessConfig::for_language(const std::string& language) {
  PreprocessConfig config;
  config.language = language;
  config.stopwords = load_stopwords(language);
  return config;
}

void PreprocessConfig::validate() const {
  if (min_token_len < 1) {
    throw Error(ErrorKind::kConfiguration, "min_token_len must be at least 1");
  }
  for (const auto* set : {&stopwords, &extra_stopwords}) {
    for (const auto& w : *set) {
      if (normalize_term(w, lowercase) != w) {
        throw Error(ErrorKind::kConfiguration, "stopword is not normalized: '" + w + "'");
      }
    }
  }
}

std::set<std::string> load_stopwords(std::string_view language) {
  const auto words = bundled_stopwords(language);
  if (words.empty()) {
    throw Error(ErrorKind::kConfiguration,
                "no bundled stopword list for language '" + std::string(language) +
                    "'; supply a stopword file");
  }
  return {words.begin(), words.end()};
}

std::set<std::string> load_stopwords_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot read stopword file " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    auto term = normalize_term(std::string_view(line).substr(first, last - first + 1));
    if (!term.empty()) words.insert(std::move(term));
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const PreprocessConfig& config) {
  const auto cps = decode(text);
  std::vector<std::string> tokens;
  std::string token;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i].value)) ++i;
    const std::size_t start = i;
    while (i < cps.size() && !is_space(cps[i].value)) ++i;
    if (start == i) continue;

    std::size_t length = 0;
    bool numeric = false;
    const std::span<const CodePoint> chunk(cps.data() + start, i - start);
    if (!normalize_chunk(chunk, text, config.strip_punctuation, config.lowercase, token, length,
                         numeric)) {
      continue;
    }
    if (length < config.min_token_len) continue;
    if (config.strip_digits && numeric) continue;
    if (config.is_stopword(token)) continue;
    tokens.push_back(config.stemmer ? config.stemmer(token) : token);
  }
  return tokens;
}

std::vector<TokenizedDoc> preprocess_corpus(const corpus::CorpusView& view,
                                            const PreprocessConfig& config) {
  config.validate();
  for (const auto& a : view.articles()) {
    if (a.language != config.language) {
      throw Error(ErrorKind::kInvalidInput, "article " + a.id + " is in language '" +
                                                a.language + "', expected '" +
                                                config.language + "'");
    }
  }
  std::vector<TokenizedDoc> docs;
  docs.reserve(view.size());
  for (const auto& a : view.articles()) {
    std::string text = a.title;
    if (!text.empty() && !a.body.empty()) text += '\n';
    text += a.body;
    docs.push_back({a.id, tokenize(text, config), a.published_at, a.language});
  }
  return docs;
}

}  // namespace cometa::preprocess
