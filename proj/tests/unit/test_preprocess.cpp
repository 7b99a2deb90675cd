#include <fstream>

#include <doctest.h>

#include "cometa/corpus_store.hpp"
#include "cometa/error.hpp"
#include "cometa/preprocess.hpp"
#include "fixtures.hpp"
#include "tempdir.hpp"

using namespace cometa;
using namespace cometa::preprocess;
using Tokens = std::vector<std::string>;

namespace {

std::string join(const Tokens& t) {
  std::string s;
  for (const auto& x : t) s += (s.empty() ? "" : " ") + x;
  return s;
}

}  // namespace

TEST_CASE("bundled stopword lists") {
  const auto en = load_stopwords("en");
  CHECK(en.contains("the"));
  CHECK(en.contains("and"));
  const auto it = load_stopwords("it");
  CHECK(it.contains("il"));
  CHECK(it.contains("della"));
  for (const auto& w : en) CHECK(normalize_term(w) == w);
  for (const auto& w : it) CHECK(normalize_term(w) == w);
  try {
    load_stopwords("xx");
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfiguration);
  }
}

TEST_CASE("tokenize examples") {
  const auto en = PreprocessConfig::for_language("en");
  CHECK(tokenize("", en).empty());
  CHECK(tokenize("The coronavirus outbreak, 2020.", en) == Tokens{"coronavirus", "outbreak"});
  CHECK(tokenize("Covid-19 spreads; covid-19 SPREADS", en) ==
        Tokens{"covid-19", "spreads", "covid-19", "spreads"});
}

TEST_CASE("tokenize rules") {
  auto c = PreprocessConfig::for_language("en");
  SUBCASE("unicode whitespace and edge punctuation") {
    CHECK(tokenize("«virus» — “outbreak”\tpeople's", c) ==
          Tokens{"virus", "outbreak", "people's"});
  }
  SUBCASE("case folding beyond ascii") {
    c.stopwords.clear();
    // Simple folding: capital sigma always becomes medial sigma.
    CHECK(tokenize("ÉPIDÉMIE Città ΙΟΣ", c) == Tokens{"épidémie", "città", "ιοσ"});
  }
  SUBCASE("digits") {
    CHECK(tokenize("19 2,000 3.5% covid-19 h1n1", c) == Tokens{"covid-19", "h1n1"});
    c.strip_digits = false;
    CHECK(tokenize("19 2,000 covid-19", c) == Tokens{"19", "2,000", "covid-19"});
  }
  SUBCASE("punctuation-only tokens vanish") {
    CHECK(tokenize("... -- !! ?", c).empty());
  }
  SUBCASE("length counts code points") {
    c.min_token_len = 3;
    CHECK(tokenize("uk ué già flu", c) == Tokens{"già", "flu"});
  }
  SUBCASE("case preserved on request") {
    c.lowercase = false;
    c.stopwords.clear();
    CHECK(tokenize("Wuhan WHO", c) == Tokens{"Wuhan", "WHO"});
  }
  SUBCASE("punctuation kept on request") {
    c.strip_punctuation = false;
    CHECK(tokenize("virus, outbreak.", c) == Tokens{"virus,", "outbreak."});
  }
  SUBCASE("extra stopwords and stemmer hook") {
    c.extra_stopwords = {"said"};
    c.stemmer = [](std::string_view s) {
      std::string out(s);
      if (out.size() > 3 && out.back() == 's') out.pop_back();
      return out;
    };
    CHECK(tokenize("Officials said masks", c) == Tokens{"official", "mask"});
  }
}

TEST_CASE("config validation") {
  auto c = PreprocessConfig::for_language("it");
  CHECK_NOTHROW(c.validate());
  c.min_token_len = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = PreprocessConfig::for_language("en");
  c.extra_stopwords = {"Virus"};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("stopword file") {
  testing::TempDir tmp;
  const auto path = tmp.path() / "stop.txt";
  std::ofstream(path) << "# custom list\nVirus\n  outbreak  \n\n# done\n";
  CHECK(load_stopwords_file(path) == std::set<std::string>{"virus", "outbreak"});
  CHECK_THROWS_AS(load_stopwords_file(tmp.path() / "missing.txt"), Error);
}

TEST_CASE("properties on random text") {
  Rng rng(5);
  const std::vector<std::string> pieces = {"The",  "virus,", "OUTBREAK", "2020",   "covid-19",
                                           "...",  "Città", "people's", "a",      "é",
                                           "uk.",  "«news»", "of",       "h1n1",   "—"};
  auto c = PreprocessConfig::for_language("en");
  for (int round = 0; round < 200; ++round) {
    std::string text;
    const auto n = rng.below(20);
    for (std::size_t i = 0; i < n; ++i) text += pieces[rng.below(pieces.size())] + " ";
    const auto tokens = tokenize(text, c);
    // Idempotence on the space-joined output.
    CHECK(tokenize(join(tokens), c) == tokens);
    // Every token passes the filters.
    for (const auto& t : tokens) {
      CHECK_FALSE(c.is_stopword(t));
      CHECK(normalize_term(t) == t);
    }
    // Adding a stopword never adds tokens.
    auto more = c;
    more.extra_stopwords.insert(pieces[rng.below(pieces.size())] == "virus," ? "virus" : "people's");
    CHECK(tokenize(text, more).size() <= tokens.size());
    // Determinism.
    CHECK(tokenize(text, c) == tokens);
  }
}

TEST_CASE("preprocess_corpus composes tokenize") {
  testing::TempDir tmp;
  corpus::CorpusStore store(tmp.path());
  const auto lines = testing::synthetic_articles(100, 21);
  store.ingest_documents(lines, "c");
  const auto view = store.filter_corpus("c");
  const auto c = PreprocessConfig::for_language("en");
  const auto docs = preprocess_corpus(view, c);
  REQUIRE(docs.size() == view.size());
  std::size_t total = 0, expected = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& a = view.articles()[i];
    CHECK(docs[i].article_id == a.id);
    CHECK(docs[i].published_at == a.published_at);
    CHECK(docs[i].tokens == tokenize(a.title + "\n" + a.body, c));
    total += docs[i].tokens.size();
    expected += tokenize(a.title, c).size() + tokenize(a.body, c).size();
  }
  CHECK(total == expected);

  corpus::CorpusFilter none;
  none.sources = {"nobody"};
  CHECK(preprocess_corpus(corpus::filter_view(view, none), c).empty());
}

TEST_CASE("language mismatch names the article") {
  testing::TempDir tmp;
  corpus::CorpusStore store(tmp.path());
  store.ingest_documents(
      std::vector{testing::article_json("en-1", "s", "en", "2020-01-01", "t", "hello world"),
                  testing::article_json("it-7", "s", "it", "2020-01-02", "t", "ciao mondo")},
      "mix");
  try {
    preprocess_corpus(store.filter_corpus("mix"), PreprocessConfig::for_language("en"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("it-7") != std::string::npos);
  }
}
