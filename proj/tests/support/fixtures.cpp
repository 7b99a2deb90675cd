#include "fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <nlohmann/json.hpp>

namespace cometa::testing {

double normal(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument away from zero.
  const double u = 1.0 - rng.uniform();
  const double v = rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

double gamma(Rng& rng, double shape) {
  if (shape < 1.0) {
    // Boost to shape + 1, then scale back down.
    const double u = 1.0 - rng.uniform();
    return gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia and Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration) {
  std::vector<double> out(n);
  double sum = 0.0;
  for (auto& x : out) sum += (x = gamma(rng, concentration));
  for (auto& x : out) x /= sum;
  return out;
}

std::size_t categorical(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (const double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

preprocess::TokenizedDoc make_doc(std::string id, std::vector<std::string> tokens, Date date) {
  return {std::move(id), std::move(tokens), date, "en"};
}

namespace {

std::string numbered(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%02zu", prefix, i);
  return buf;
}

}  // namespace

std::vector<preprocess::TokenizedDoc> random_corpus(Rng& rng, std::size_t max_docs,
                                                    std::size_t max_terms) {
  const std::size_t D = 1 + rng.below(max_docs);
  const std::size_t V = 1 + rng.below(max_terms);
  std::vector<preprocess::TokenizedDoc> docs;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < D; ++d) {
    const std::size_t len = rng.below(13);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < len; ++i) words.push_back(numbered('t', rng.below(V)));
    tokens += len;
    docs.push_back(make_doc(numbered('d', d), std::move(words),
                            Date(2020, 1, 1) + static_cast<int>(rng.below(30))));
  }
  if (tokens == 0) docs[rng.below(D)].tokens.push_back(numbered('t', rng.below(V)));
  return docs;
}

LdaTruth lda_corpus(std::size_t topics, std::size_t terms, std::size_t docs, std::size_t length,
                    std::uint64_t seed, double support_mass, double doc_alpha) {
  Rng rng(seed);
  LdaTruth t;
  for (std::size_t v = 0; v < terms; ++v) t.vocabulary.push_back(numbered('w', v));
  const std::size_t block = terms / topics;
  for (std::size_t k = 0; k < topics; ++k) {
    const auto inside = dirichlet(rng, block, 1.0);
    std::vector<double> row(terms, (1.0 - support_mass) / static_cast<double>(terms - block));
    for (std::size_t i = 0; i < block; ++i) row[k * block + i] = support_mass * inside[i];
    t.phi.push_back(std::move(row));
  }
  for (std::size_t d = 0; d < docs; ++d) {
    auto theta = dirichlet(rng, topics, doc_alpha);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) {
      const auto k = categorical(rng, theta);
      words.push_back(t.vocabulary[categorical(rng, t.phi[k])]);
    }
    t.theta.push_back(std::move(theta));
    t.docs.push_back(make_doc(numbered('d', d), std::move(words),
                              Date(2020, 1, 1) + static_cast<int>(d % 60)));
  }
  return t;
}

std::vector<std::pair<std::string, std::set<std::size_t>>> grid_memberships() {
  // Topics 0..4. Degree table: people, virus 0.8; health, outbreak, china 0.6;
  // public, uk, government, world, cases, wuhan 0.4; the rest 0.2.
  return {
      {"people", {0, 1, 3, 4}}, {"virus", {1, 2, 3, 4}},    {"health", {0, 2, 4}},
      {"outbreak", {1, 3, 4}},  {"china", {1, 2, 3}},       {"public", {0, 4}},
      {"uk", {0, 1}},           {"government", {1, 2}},     {"world", {1, 4}},
      {"cases", {2, 3}},        {"wuhan", {2, 3}},          {"masks", {0}},
      {"staff", {0}},           {"patients", {0}},          {"home", {4}},
  };
}

std::vector<std::vector<std::string>> seeded_clusters() {
  return {
      {"health", "masks", "staff", "nurses", "doctors", "hospital", "equipment", "patients"},
      {"global", "government", "economy", "travel", "markets", "trade", "minister", "banks"},
      {"cases", "china", "wuhan", "beijing", "province", "quarantine", "lockdown", "officials"},
      {"virus", "outbreak", "flu", "sars", "symptoms", "respiratory", "infection", "vaccine"},
      {"time", "public", "disease", "media", "news", "social", "information", "twitter"},
  };
}

std::vector<preprocess::TokenizedDoc> cluster_corpus(
    const std::vector<std::vector<std::string>>& clusters, std::size_t docs, std::size_t length,
    double noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<preprocess::TokenizedDoc> out;
  for (std::size_t d = 0; d < docs; ++d) {
    const std::size_t home = d % clusters.size();
    std::vector<std::string> words;
    for (std::size_t i = 0; i < length; ++i) {
      std::size_t c = home;
      if (rng.uniform() < noise) c = rng.below(clusters.size());
      // Zipf-like weights inside a cluster give each topic a clear head.
      std::vector<double> w;
      for (std::size_t j = 0; j < clusters[c].size(); ++j) w.push_back(1.0 / (1.0 + j));
      words.push_back(clusters[c][categorical(rng, w)]);
    }
    out.push_back(make_doc(numbered('c', d), std::move(words),
                           Date(2020, 1, 20) + static_cast<int>(d % 70)));
  }
  return out;
}

sentiment::Lexicon trough_lexicon() {
  return {"en", {{"good", 1}, {"bad", -1}, {"crisis", -3}, {"fear", -2}, {"hope", 2}}};
}

std::vector<Date> trough_dates() {
  return {Date(2020, 1, 25), Date(2020, 2, 15), Date(2020, 3, 11)};
}

std::vector<preprocess::TokenizedDoc> trough_corpus() {
  const auto marks = trough_dates();
  std::vector<preprocess::TokenizedDoc> docs;
  int n = 0;
  for (Date d(2020, 1, 1); d <= Date(2020, 3, 31); d = d + 1) {
    const auto id = [&] { return "s" + std::to_string(n++); };
    bool mark = false;
    for (const auto m : marks) mark = mark || m == d;
    if (mark) {
      docs.push_back(make_doc(id(), {"crisis", "fear", "crisis", "news"}, d));
      docs.push_back(make_doc(id(), {"fear", "crisis", "bad"}, d));
      continue;
    }
    // Background: days alternate between a balanced pair and a mildly
    // positive pair, so no background day stands out from its neighbours.
    docs.push_back(make_doc(id(), {"good", "news", "report"}, d));
    if ((d - Date(2020, 1, 1)) % 2 == 0) {
      docs.push_back(make_doc(id(), {"bad", "report"}, d));
    } else {
      docs.push_back(make_doc(id(), {"hope", "bad", "report"}, d));
    }
  }
  return docs;
}

std::string article_json(const std::string& id, const std::string& source,
                         const std::string& language, const std::string& date,
                         const std::string& title, const std::string& body) {
  return nlohmann::json({{"id", id},
                         {"source", source},
                         {"language", language},
                         {"published_at", date},
                         {"title", title},
                         {"body", body}})
      .dump();
}

std::vector<std::string> synthetic_articles(std::size_t count, std::uint64_t seed,
                                            const std::string& id_prefix) {
  static const std::vector<std::vector<std::string>> themes = {
      {"hospital", "doctors", "nurses", "masks", "patients", "staff", "health", "care",
       "equipment", "ward"},
      {"economy", "markets", "government", "trade", "travel", "minister", "banks", "jobs",
       "budget", "global"},
      {"china", "wuhan", "cases", "beijing", "lockdown", "quarantine", "province", "outbreak",
       "virus", "spread"},
  };
  static const std::vector<std::string> moods = {"crisis", "fear", "panic", "death", "hope",
                                                 "support", "recovery", "good", "bad", "calm"};
  static const std::vector<std::string> filler = {"the", "and", "of", "in", "a", "to",
                                                  "is", "on", "with", "for"};
  static const std::vector<std::string> sources = {"guardian", "bbc", "times"};
  Rng rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& theme = themes[rng.below(themes.size())];
    std::string title = theme[rng.below(theme.size())] + " " + theme[rng.below(theme.size())];
    std::string body;
    const std::size_t len = 30 + rng.below(30);
    for (std::size_t j = 0; j < len; ++j) {
      const double u = rng.uniform();
      const std::string* w;
      if (u < 0.6) {
        w = &theme[rng.below(theme.size())];
      } else if (u < 0.75) {
        const auto& other = themes[rng.below(themes.size())];
        w = &other[rng.below(other.size())];
      } else if (u < 0.85) {
        w = &moods[rng.below(moods.size())];
      } else {
        w = &filler[rng.below(filler.size())];
      }
      if (!body.empty()) body += rng.below(8) == 0 ? ", " : " ";
      body += *w;
    }
    body += ".";
    const auto date = (Date(2020, 1, 1) + static_cast<int>(rng.below(90))).to_string();
    char id[32];
    std::snprintf(id, sizeof id, "%s%05zu", id_prefix.c_str(), i);
    out.push_back(article_json(id, sources[rng.below(sources.size())], "en", date, title, body));
  }
  return out;
}

}  // namespace cometa::testing
