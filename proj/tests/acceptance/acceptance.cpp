// One PASS/FAIL line per primary acceptance criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "cometa/coocnet.hpp"
#include "cometa/dtm.hpp"
#include "cometa/error.hpp"
#include "cometa/pipeline.hpp"
#include "cometa/sentiment.hpp"
#include "cometa/topicmodel.hpp"
#include "cometa/topicnet.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace cometa;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) detail << what << "; ";
    ok = ok && condition;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::vector<double>> rows_of(const topicmodel::Matrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < m.rows; ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

// Row sums of phi and theta within 1e-9 of one.
bool rows_normalized(const topicmodel::LdaModel& m) {
  for (const auto* mat : {&m.phi, &m.theta}) {
    for (std::size_t r = 0; r < mat->rows; ++r) {
      const auto row = mat->row(r);
      if (std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) > 1e-9) return false;
    }
  }
  return true;
}

// Recounts every sampler table from the token assignments.
bool counts_conserved(const topicmodel::SamplerState& s, const dtm::DocumentTermMatrix& x) {
  const std::size_t K = s.topics, V = s.terms;
  std::vector<std::uint32_t> dk(x.num_docs() * K, 0), kv(K * V, 0), k(K, 0);
  for (std::size_t d = 0; d < x.num_docs(); ++d) {
    std::uint64_t len = 0;
    for (const auto& e : x.row(d)) len += e.count;
    if (s.doc_offsets[d + 1] - s.doc_offsets[d] != len) return false;
    for (auto i = s.doc_offsets[d]; i < s.doc_offsets[d + 1]; ++i) {
      ++dk[d * K + s.token_topics[i]];
      ++kv[s.token_topics[i] * V + s.token_terms[i]];
      ++k[s.token_topics[i]];
    }
  }
  return std::equal(dk.begin(), dk.end(), s.doc_topic.begin()) &&
         std::equal(kv.begin(), kv.end(), s.topic_word.begin()) &&
         std::equal(k.begin(), k.end(), s.topic_total.begin());
}

double row_closeness(const topicnet::BipartiteCentrality& t, const std::string& node) {
  for (const auto& r : t.rows) {
    if (r.node == node) return r.closeness_norm;
  }
  return -1;
}

Outcome membership_degree() {
  Outcome o;
  const auto start = Clock::now();
  const auto memberships = testing::grid_memberships();
  const auto g = topicnet::from_memberships(5, memberships);
  const auto d = topicnet::bipartite_degree(g);
  const double elapsed = seconds_since(start);
  const std::map<std::string, double> expected = {
      {"people", 0.8}, {"virus", 0.8},      {"health", 0.6},     {"outbreak", 0.6},
      {"china", 0.6},  {"public", 0.4},     {"uk", 0.4},         {"government", 0.4},
      {"world", 0.4},  {"cases", 0.4},      {"wuhan", 0.4},      {"masks", 0.2},
      {"staff", 0.2},  {"home", 0.2},       {"patients", 0.2}};
  std::size_t seen = 0;
  for (const auto& r : d.rows) {
    const auto it = expected.find(r.node);
    if (it == expected.end()) continue;
    ++seen;
    o.require(std::abs(r.degree_norm - it->second) <= 1e-12, "degree of " + r.node);
  }
  o.require(seen == expected.size(), "missing term nodes");
  o.require(elapsed < 1.0, "runtime");
  o.detail << "15 terms, " << elapsed * 1000 << " ms";
  return o;
}

Outcome membership_closeness() {
  Outcome o;
  Rng rng(2020);
  double worst = 0;
  for (int round = 0; round < 200; ++round) {
    const std::size_t K = 1 + rng.below(8);
    const std::size_t T = 1 + rng.below(30 - K);
    std::vector<std::pair<std::string, std::set<std::size_t>>> terms;
    for (std::size_t t = 0; t < T; ++t) {
      std::set<std::size_t> topics{rng.below(K)};
      while (rng.below(3) == 0) topics.insert(rng.below(K));
      terms.push_back({"w" + std::to_string(100 + t), topics});
    }
    const auto g = topicnet::from_memberships(K, terms);
    const std::size_t n = K + T;
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n));
    for (std::size_t t = 0; t < T; ++t) {
      for (const auto k : terms[t].second) adj[k][K + t] = adj[K + t][k] = true;
    }
    const auto expected = oracle::closeness(adj);
    const auto c = topicnet::bipartite_closeness(g);
    if (c.rows.size() != n) {
      o.require(false, "node count");
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(c.rows[i].closeness_norm - expected[i]));
    }
  }
  o.require(worst <= 1e-9, "oracle mismatch");

  // Top tier: every multi-topic term, including the named ones, beats every
  // single-topic term.
  const auto memberships = testing::grid_memberships();
  const auto c = topicnet::bipartite_closeness(topicnet::from_memberships(5, memberships));
  double weakest_multi = 1.0, strongest_single = 0.0;
  for (const auto& [term, topics] : memberships) {
    const double v = row_closeness(c, term);
    if (topics.size() >= 2) weakest_multi = std::min(weakest_multi, v);
    else strongest_single = std::max(strongest_single, v);
  }
  o.require(weakest_multi > strongest_single, "tier separation");
  for (const auto* t : {"outbreak", "virus", "china", "government", "world"}) {
    o.require(row_closeness(c, t) >= weakest_multi, std::string("tier of ") + t);
  }
  o.detail << "200 graphs, max error " << worst << ", tier floor " << weakest_multi << " > "
           << strongest_single;
  return o;
}

struct Fit {
  dtm::DocumentTermMatrix dtm;
  topicmodel::LdaModel model;
  double seconds = 0;
  bool conserved = true;
  std::size_t checked_sweeps = 0;
};

Fit fit_recovery_model(const testing::LdaTruth& truth) {
  Fit f;
  f.dtm = dtm::build_dtm(truth.docs);
  topicmodel::LdaConfig c;
  c.topics = 3;
  c.iterations = 500;
  c.seed = 42;
  const auto start = Clock::now();
  f.model = topicmodel::fit_lda(f.dtm, c, [&](const topicmodel::SamplerState& s) {
    if (s.iteration == 1 || s.iteration == c.iterations / 2 || s.iteration == c.iterations) {
      f.conserved = f.conserved && counts_conserved(s, f.dtm);
      ++f.checked_sweeps;
    }
  });
  f.seconds = seconds_since(start);
  return f;
}

Outcome lda_recovery(const Fit& f, const testing::LdaTruth& truth) {
  Outcome o;
  const auto cosines = oracle::aligned_cosines(rows_of(f.model.phi), truth.phi);
  const double worst = *std::min_element(cosines.begin(), cosines.end());
  o.require(f.model.vocabulary == truth.vocabulary, "vocabulary");
  o.require(worst >= 0.9, "cosine below 0.9");
  o.require(f.seconds < 60.0, "runtime");
  o.detail << "min aligned cosine " << worst << ", " << f.seconds << " s";
  return o;
}

Outcome lda_invariants(const std::vector<const topicmodel::LdaModel*>& models, const Fit& f,
                       const testing::LdaTruth& truth) {
  Outcome o;
  for (const auto* m : models) o.require(rows_normalized(*m), "row sums");
  o.require(f.conserved && f.checked_sweeps == 3, "count conservation at sweeps 1, mid, last");
  const auto again = fit_recovery_model(truth);
  o.require(topicmodel::save_model(again.model, true) == topicmodel::save_model(f.model, true),
            "rerun differs");
  o.detail << models.size() << " models, 3 sweeps recounted, rerun byte-identical";
  return o;
}

Outcome dtm_oracles() {
  Outcome o;
  Rng rng(1100);
  std::size_t trims = 0;
  for (int round = 0; round < 100; ++round) {
    const auto docs = testing::random_corpus(rng, 20, 50);
    const auto m = dtm::build_dtm(docs);
    const auto nested = oracle::count_nested(docs);
    bool same = m.vocabulary == nested.vocabulary && m.num_docs() == docs.size();
    for (std::size_t d = 0; same && d < docs.size(); ++d) {
      for (std::size_t v = 0; v < nested.vocabulary.size(); ++v) {
        same = same && m.count(d, v) == nested.counts[d][v];
      }
    }
    o.require(same, "build_dtm differs from nested counting");

    const auto dense = oracle::gram(nested, true);
    const auto g = coocnet::cooccurrence(m, coocnet::CoocMode::kBinary);
    bool cooc = true;
    for (std::size_t u = 0; u < m.num_terms(); ++u) {
      for (std::size_t v = 0; v < m.num_terms(); ++v) {
        if (u != v) cooc = cooc && g.weight(u, v) == dense[u][v];
      }
    }
    o.require(cooc, "binary co-occurrence differs from the dense gram matrix");

    for (const unsigned p : {50u, 75u, 90u, 99u, 100u}) {
      const auto kept = oracle::keep_by_doc_count(nested, p);
      if (kept.empty()) continue;
      ++trims;
      o.require(dtm::trim_sparse(m, p / 100.0).vocabulary == kept,
                "trim_sparse differs from the doc-count filter");
    }
  }
  o.detail << "100 corpora, " << trims << " trims";
  return o;
}

Outcome sentiment_checks() {
  Outcome o;
  const auto lex = testing::trough_lexicon();
  const std::vector<std::string> words = {"good", "bad", "crisis", "fear", "hope", "virus", "the"};
  Rng rng(404);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::string> a, b;
    for (auto n = rng.below(25); n > 0; --n) a.push_back(words[rng.below(words.size())]);
    for (auto n = rng.below(25); n > 0; --n) b.push_back(words[rng.below(words.size())]);
    auto ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    o.require(sentiment::score_document(ab, lex).score ==
                  sentiment::score_document(a, lex).score + sentiment::score_document(b, lex).score,
              "additivity");
  }

  for (int round = 0; round < 20; ++round) {
    std::vector<preprocess::TokenizedDoc> docs;
    for (auto n = 1 + rng.below(100); n > 0; --n) {
      std::vector<std::string> t;
      for (auto k = rng.below(12); k > 0; --k) t.push_back(words[rng.below(words.size())]);
      docs.push_back(testing::make_doc("d" + std::to_string(n), t,
                                       Date(2020, 1, 1) + static_cast<int>(rng.below(60))));
    }
    const auto series = sentiment::sentiment_series(docs, lex);
    const auto expected = oracle::group_by_day(docs, lex);
    bool same = series.points.size() == expected.size();
    auto it = expected.begin();
    for (std::size_t i = 0; same && i < series.points.size(); ++i, ++it) {
      const auto& p = series.points[i];
      same = p.date == it->first && p.doc_count == it->second.docs &&
             p.total_polarity == static_cast<double>(it->second.total) &&
             p.mean_polarity == p.total_polarity / static_cast<double>(p.doc_count);
    }
    o.require(same, "daily series differs from the group-by oracle");
  }

  const auto peaks =
      sentiment::find_peaks(sentiment::sentiment_series(testing::trough_corpus(), lex), 3, 1.0);
  o.require(peaks == testing::trough_dates(), "trough dates");
  o.detail << "100 additivity pairs, 20 series, peaks";
  for (const auto& d : peaks) o.detail << " " << d.to_string();
  return o;
}

Outcome pipeline_determinism() {
  Outcome o;
  const auto articles = testing::synthetic_articles(500, 500);
  pipeline::PipelineConfig config;
  config.corpus_id = "news";
  config.lda.topics = 3;
  std::vector<pipeline::AnalysisBundle> bundles;
  double slowest = 0;
  for (int run = 0; run < 2; ++run) {
    testing::TempDir dir;
    corpus::CorpusStore store(dir.path());
    const auto report = store.ingest_documents(articles, "news");
    o.require(report.accepted == 500, "ingest");
    const auto start = Clock::now();
    bundles.push_back(pipeline::run_pipeline(store, pipeline::BundleStore(dir.path()), config));
    slowest = std::max(slowest, seconds_since(start));
  }
  o.require(bundles[0].key == bundles[1].key, "bundle keys differ");
  o.require(bundles[0].files == bundles[1].files, "bundle bytes differ");
  o.require(slowest < 60.0, "runtime");
  std::size_t bytes = 0;
  for (const auto& [name, content] : bundles[0].files) bytes += content.size();
  o.detail << bundles[0].files.size() << " files, " << bytes << " bytes identical, slowest run "
           << slowest << " s";
  return o;
}

Outcome seeded_cluster_recovery(topicmodel::LdaModel& out) {
  Outcome o;
  const auto clusters = testing::seeded_clusters();
  const auto docs = testing::cluster_corpus(clusters, 250, 60, 0.1, 11);
  topicmodel::LdaConfig c;
  c.topics = 5;
  c.iterations = 1000;
  c.seed = 42;
  out = topicmodel::fit_lda(dtm::build_dtm(docs), c);
  const auto ttm = topicmodel::top_terms_per_topic(out, 4);
  std::set<std::size_t> covered;
  for (std::size_t k = 0; k < ttm.per_topic.size(); ++k) {
    std::set<std::size_t> homes;
    for (const auto& [term, w] : ttm.per_topic[k]) {
      for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (std::find(clusters[i].begin(), clusters[i].end(), term) != clusters[i].end()) {
          homes.insert(i);
        }
      }
    }
    o.require(ttm.per_topic[k].size() == 4 && homes.size() == 1,
              "topic " + std::to_string(k + 1) + " mixes clusters");
    if (homes.size() == 1) covered.insert(*homes.begin());
    o.detail << "T" << k + 1 << ":";
    for (const auto& [term, w] : ttm.per_topic[k]) o.detail << " " << term;
    o.detail << (k + 1 < ttm.per_topic.size() ? "; " : "");
  }
  o.detail << " (" << covered.size() << " of 5 clusters)";
  return o;
}

void report(const std::string& name, const std::function<Outcome()>& check, int& failures) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "exception: " << e.what();
  }
  if (!o.ok) ++failures;
  std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  int failures = 0;
  report("membership-degree", membership_degree, failures);
  report("membership-closeness", membership_closeness, failures);

  const auto truth = testing::lda_corpus(3, 30, 200, 50, 7);
  const auto recovery = fit_recovery_model(truth);
  report("lda-recovery", [&] { return lda_recovery(recovery, truth); }, failures);

  topicmodel::LdaModel cluster_model;
  const auto clusters = [&] { return seeded_cluster_recovery(cluster_model); };
  report("dtm-cooc-oracles", dtm_oracles, failures);
  report("sentiment", sentiment_checks, failures);
  report("pipeline-determinism", pipeline_determinism, failures);
  report("seeded-clusters", clusters, failures);
  report("lda-invariants",
         [&] { return lda_invariants({&recovery.model, &cluster_model}, recovery, truth); }, failures);

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
