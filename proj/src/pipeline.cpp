#include "cometa/pipeline.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include "cometa/digest.hpp"
#include "cometa/error.hpp"

namespace cometa::pipeline {

// Defined in the generated builtin_lexicons.cpp.
std::optional<std::string_view> builtin_lexicon(std::string_view language);

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kBuiltinPrefix = "builtin:";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

fs::path resolve_path(const std::string& name, const fs::path& data_dir) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  if (!data_dir.empty() && fs::exists(data_dir / p)) return data_dir / p;
  return p;
}

// Raw lexicon text plus a label for diagnostics.
std::string lexicon_text(const PipelineConfig& config, const fs::path& data_dir) {
  if (config.lexicon.starts_with(kBuiltinPrefix)) {
    const auto lang = std::string_view(config.lexicon).substr(kBuiltinPrefix.size());
    if (const auto text = builtin_lexicon(lang)) return std::string(*text);
    throw Error(ErrorKind::kConfiguration, "no builtin lexicon '" + config.lexicon + "'");
  }
  return read_file(resolve_path(config.lexicon, data_dir));
}

json date_or_null(const std::optional<Date>& d) {
  return d ? json(d->to_string()) : json(nullptr);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kConfiguration, std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto k : known) ok = ok || key == k;
    if (!ok) {
      throw Error(ErrorKind::kConfiguration,
                  "unknown field '" + key + "' in " + std::string(where));
    }
  }
}

std::optional<Date> parse_optional_date(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  const auto d = Date::parse(it->get<std::string>());
  if (!d) throw Error(ErrorKind::kConfiguration, std::string("bad date in filter.") + key);
  return d;
}

template <typename Fn>
auto in_stage(std::string_view name, const StageObserver& observer, Fn&& fn) {
  if (observer) observer(name);
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(std::string(name), e.kind(), e.what());
  } catch (const std::exception& e) {
    throw StageError(std::string(name), ErrorKind::kIo, e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct BundleKey {
  std::string key;
  std::string lexicon_digest;
};

// Addresses (config, corpus snapshot, lexicon, stopword file) together.
BundleKey bundle_key(const PipelineConfig& config, const std::string& corpus_digest,
                     const fs::path& data_dir) {
  BundleKey k;
  k.lexicon_digest = sha256_hex(lexicon_text(config, data_dir));
  std::string stopword_digest;
  if (config.preprocess.stopwords_file) {
    stopword_digest =
        sha256_hex(read_file(resolve_path(*config.preprocess.stopwords_file, data_dir)));
  }
  k.key = sha256_hex(config_hash(config) + '\n' + corpus_digest + '\n' + k.lexicon_digest +
                     '\n' + stopword_digest);
  return k;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!corpus::valid_corpus_id(corpus_id)) {
    throw Error(ErrorKind::kConfiguration, "invalid corpus id: '" + corpus_id + "'");
  }
  if (!(max_sparsity > 0.0 && max_sparsity <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "max_sparsity must be in (0, 1]");
  }
  if (preprocess.min_token_len < 1) {
    throw Error(ErrorKind::kConfiguration, "min_token_len must be at least 1");
  }
  if (top_n < 1 || top_terms < 1) {
    throw Error(ErrorKind::kConfiguration, "top_n and top_terms must be at least 1");
  }
  if (peak_window < 1 || peak_prominence < 0.0) {
    throw Error(ErrorKind::kConfiguration, "peak window must be >= 1 and prominence >= 0");
  }
  if (cooc_min_weight < 1) throw Error(ErrorKind::kConfiguration, "cooc min_weight must be >= 1");
  lda.validate();
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    reject_unknown(j,
                   {"corpus_id", "filter", "preprocess", "max_sparsity", "lexicon", "cooc", "lda",
                    "top_n", "top_terms", "peaks"},
                   "config");
    c.corpus_id = j.at("corpus_id").get<std::string>();
    if (const auto it = j.find("filter"); it != j.end() && !it->is_null()) {
      reject_unknown(*it, {"sources", "languages", "from", "to"}, "filter");
      c.filter.sources = get_or(*it, "sources", std::set<std::string>{});
      c.filter.languages = get_or(*it, "languages", std::set<std::string>{});
      c.filter.dates.from = parse_optional_date(*it, "from");
      c.filter.dates.to = parse_optional_date(*it, "to");
    }
    if (const auto it = j.find("preprocess"); it != j.end() && !it->is_null()) {
      reject_unknown(*it,
                     {"language", "lowercase", "strip_punctuation", "strip_digits",
                      "min_token_len", "extra_stopwords", "stopwords_file"},
                     "preprocess");
      auto& p = c.preprocess;
      p.language = get_or(*it, "language", p.language);
      p.lowercase = get_or(*it, "lowercase", p.lowercase);
      p.strip_punctuation = get_or(*it, "strip_punctuation", p.strip_punctuation);
      p.strip_digits = get_or(*it, "strip_digits", p.strip_digits);
      p.min_token_len = get_or(*it, "min_token_len", p.min_token_len);
      p.extra_stopwords = get_or(*it, "extra_stopwords", p.extra_stopwords);
      if (it->contains("stopwords_file") && !(*it)["stopwords_file"].is_null()) {
        p.stopwords_file = (*it)["stopwords_file"].get<std::string>();
      }
    }
    c.max_sparsity = get_or(j, "max_sparsity", c.max_sparsity);
    c.lexicon = get_or(j, "lexicon", c.lexicon);
    if (const auto it = j.find("cooc"); it != j.end() && !it->is_null()) {
      reject_unknown(*it, {"mode", "min_weight"}, "cooc");
      c.cooc_mode = coocnet::parse_mode(get_or(*it, "mode", std::string("binary")));
      c.cooc_min_weight = get_or(*it, "min_weight", c.cooc_min_weight);
    }
    if (const auto it = j.find("lda"); it != j.end() && !it->is_null()) {
      reject_unknown(*it,
                     {"topics", "alpha", "beta", "iterations", "burn_in", "sample_lag", "seed"},
                     "lda");
      auto& l = c.lda;
      l.topics = get_or(*it, "topics", l.topics);
      if (it->contains("alpha") && !(*it)["alpha"].is_null()) {
        l.alpha = (*it)["alpha"].get<double>();
      }
      l.beta = get_or(*it, "beta", l.beta);
      l.iterations = get_or(*it, "iterations", l.iterations);
      l.burn_in = get_or(*it, "burn_in", l.burn_in);
      l.sample_lag = get_or(*it, "sample_lag", l.sample_lag);
      l.seed = get_or(*it, "seed", l.seed);
    }
    c.top_n = get_or(j, "top_n", c.top_n);
    c.top_terms = get_or(j, "top_terms", c.top_terms);
    if (const auto it = j.find("peaks"); it != j.end() && !it->is_null()) {
      reject_unknown(*it, {"window", "min_prominence"}, "peaks");
      c.peak_window = get_or(*it, "window", c.peak_window);
      c.peak_prominence = get_or(*it, "min_prominence", c.peak_prominence);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["corpus_id"] = c.corpus_id;
  j["filter"] = {{"sources", c.filter.sources},
                 {"languages", c.filter.languages},
                 {"from", date_or_null(c.filter.dates.from)},
                 {"to", date_or_null(c.filter.dates.to)}};
  const auto& p = c.preprocess;
  j["preprocess"] = {{"language", p.language},
                     {"lowercase", p.lowercase},
                     {"strip_punctuation", p.strip_punctuation},
                     {"strip_digits", p.strip_digits},
                     {"min_token_len", p.min_token_len},
                     {"extra_stopwords", p.extra_stopwords},
                     {"stopwords_file", p.stopwords_file ? json(*p.stopwords_file) : json(nullptr)}};
  j["max_sparsity"] = c.max_sparsity;
  j["lexicon"] = c.lexicon;
  j["cooc"] = {{"mode", std::string(coocnet::to_string(c.cooc_mode))},
               {"min_weight", c.cooc_min_weight}};
  const auto& l = c.lda;
  j["lda"] = {{"topics", l.topics},         {"alpha", l.alpha ? json(*l.alpha) : json(nullptr)},
              {"beta", l.beta},             {"iterations", l.iterations},
              {"burn_in", l.burn_in},       {"sample_lag", l.sample_lag},
              {"seed", l.seed}};
  j["top_n"] = c.top_n;
  j["top_terms"] = c.top_terms;
  j["peaks"] = {{"window", c.peak_window}, {"min_prominence", c.peak_prominence}};
  return j;
}

std::string config_hash(const PipelineConfig& config) {
  return sha256_hex(config_to_json(config).dump());
}

json AnalysisBundle::manifest() const { return json::parse(files.at("manifest.json")); }

const std::string& AnalysisBundle::section_bytes(std::string_view name) const {
  const auto it = files.find(std::string(name) + ".json");
  if (it == files.end()) {
    throw Error(ErrorKind::kNotFound, "unknown bundle section: " + std::string(name));
  }
  return it->second;
}

json AnalysisBundle::section(std::string_view name) const {
  return json::parse(section_bytes(name));
}

BundleStore::BundleStore(fs::path root) : dir_(std::move(root) / "bundles") {}

bool BundleStore::contains(const std::string& key) const {
  return fs::exists(dir_ / key / "manifest.json");
}

std::optional<AnalysisBundle> BundleStore::load(const std::string& key) const {
  if (key.empty() || key.find_first_not_of("0123456789abcdef") != std::string::npos) {
    return std::nullopt;
  }
  if (!contains(key)) return std::nullopt;
  AnalysisBundle bundle;
  bundle.key = key;
  for (const auto& entry : fs::directory_iterator(dir_ / key)) {
    if (entry.is_regular_file()) {
      bundle.files[entry.path().filename().string()] = read_file(entry.path());
    }
  }
  bundle.config_hash = bundle.manifest().at("config_hash").get<std::string>();
  return bundle;
}

void BundleStore::publish(const AnalysisBundle& bundle) const {
  static std::atomic<unsigned> counter{0};
  fs::create_directories(dir_);
  const auto final_dir = dir_ / bundle.key;
  if (fs::exists(final_dir)) return;
  const auto tmp = dir_ / (".tmp-" + bundle.key + "-" + std::to_string(::getpid()) + "-" +
                           std::to_string(counter++));
  fs::create_directories(tmp);
  for (const auto& [name, bytes] : bundle.files) {
    std::ofstream out(tmp / name, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      fs::remove_all(tmp);
      throw Error(ErrorKind::kIo, "cannot write bundle file " + name);
    }
  }
  std::error_code ec;
  fs::rename(tmp, final_dir, ec);
  // Losing the race to an identical bundle is fine: content is the same.
  if (ec) fs::remove_all(tmp);
}

sentiment::Lexicon resolve_lexicon(const PipelineConfig& config, const fs::path& data_dir) {
  return sentiment::parse_lexicon(lexicon_text(config, data_dir), config.preprocess.language)
      .lexicon;
}

preprocess::PreprocessConfig resolve_preprocess(const PipelineConfig& config,
                                                const fs::path& data_dir) {
  const auto& s = config.preprocess;
  preprocess::PreprocessConfig p;
  p.language = s.language;
  p.lowercase = s.lowercase;
  p.strip_punctuation = s.strip_punctuation;
  p.strip_digits = s.strip_digits;
  p.min_token_len = s.min_token_len;
  p.stopwords = s.stopwords_file
                    ? preprocess::load_stopwords_file(resolve_path(*s.stopwords_file, data_dir))
                    : preprocess::load_stopwords(s.language);
  for (const auto& w : s.extra_stopwords) {
    if (auto n = preprocess::normalize_term(w, s.lowercase); !n.empty()) {
      p.extra_stopwords.insert(std::move(n));
    }
  }
  return p;
}

json to_json(const corpus::CorpusStats& stats) {
  json j;
  j["total"] = stats.total;
  j["by_language"] = stats.by_language;
  j["by_source"] = stats.by_source;
  j["date_range"] = stats.date_range
                        ? json::array({stats.date_range->first.to_string(),
                                       stats.date_range->second.to_string()})
                        : json(nullptr);
  return j;
}

json to_json(const std::vector<dtm::TermFrequency>& terms) {
  json list = json::array();
  for (const auto& t : terms) {
    list.push_back({{"term", t.term}, {"total", t.total_count}, {"docs", t.doc_count}});
  }
  return list;
}

json to_json(const sentiment::SentimentSeries& series, const std::vector<Date>& peaks) {
  json points = json::array();
  for (const auto& p : series.points) {
    points.push_back({{"date", p.date.to_string()},
                      {"mean", p.mean_polarity},
                      {"docs", p.doc_count},
                      {"total", p.total_polarity}});
  }
  json peak_list = json::array();
  for (const auto& d : peaks) peak_list.push_back(d.to_string());
  return {{"points", points}, {"peaks", peak_list}};
}

json to_json(const coocnet::CoocGraph& graph, const coocnet::CentralityTable& table) {
  json nodes = json::array();
  for (const auto& r : table.rows) {
    nodes.push_back({{"node", r.node}, {"degree", r.degree_norm}, {"closeness", r.closeness_norm}});
  }
  json edges = json::array();
  for (const auto& [pair, w] : graph.edges) {
    edges.push_back(
        {{"source", graph.nodes[pair.first]}, {"target", graph.nodes[pair.second]}, {"weight", w}});
  }
  return {{"mode", std::string(coocnet::to_string(graph.mode))}, {"nodes", nodes}, {"edges", edges}};
}

json to_json(const topicmodel::TermTopicMatrix& ttm) {
  json topics = json::array();
  for (std::size_t i = 0; i < ttm.per_topic.size(); ++i) {
    json terms = json::array();
    for (const auto& [term, w] : ttm.per_topic[i]) terms.push_back({{"term", term}, {"weight", w}});
    topics.push_back({{"topic", ttm.topics[i]},
                      {"label", topicnet::topic_label(ttm.topics[i])},
                      {"terms", terms}});
  }
  return {{"topics", topics}, {"terms", ttm.terms}};
}

json to_json(const topicnet::BipartiteGraph& graph, const topicnet::BipartiteCentrality& table,
             const std::vector<topicnet::BridgeTerm>& bridges) {
  json nodes = json::array();
  for (const auto& r : table.rows) {
    nodes.push_back({{"node", r.node},
                     {"mode", r.mode == topicnet::NodeMode::kTopic ? "topic" : "term"},
                     {"degree", r.degree_norm},
                     {"closeness", r.closeness_norm}});
  }
  json edges = json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"topic", topicnet::topic_label(graph.topic_nodes[e.topic])},
                     {"term", graph.term_nodes[e.term]},
                     {"weight", e.weight}});
  }
  json bridge_list = json::array();
  for (const auto& b : bridges) {
    json topics = json::array();
    for (const auto k : b.topics) topics.push_back(topicnet::topic_label(k));
    bridge_list.push_back({{"term", b.term}, {"topics", topics}});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"bridges", bridge_list}};
}

AnalysisBundle compute_bundle(const corpus::CorpusView& view, const PipelineConfig& config,
                              const fs::path& data_dir, const StageObserver& observer) {
  in_stage(stage::kCorpus, observer, [&] {
    config.validate();
    if (view.empty()) {
      throw Error(ErrorKind::kEmptyCorpus, "no articles match the corpus filter");
    }
    return 0;
  });

  const auto docs = in_stage(stage::kPreprocess, observer, [&] {
    return preprocess::preprocess_corpus(view, resolve_preprocess(config, data_dir));
  });

  struct DtmStage {
    dtm::DocumentTermMatrix full;
    dtm::DocumentTermMatrix trimmed;
    std::vector<dtm::TermFrequency> top;
  };
  const auto matrix = in_stage(stage::kDtm, observer, [&] {
    DtmStage s;
    s.full = dtm::build_dtm(docs);
    s.trimmed = dtm::trim_sparse(s.full, config.max_sparsity);
    s.top = dtm::top_terms(s.trimmed, config.top_terms);
    return s;
  });

  const auto sentiment_json = in_stage(stage::kSentiment, observer, [&] {
    const auto lexicon = resolve_lexicon(config, data_dir);
    const auto series = sentiment::sentiment_series(docs, lexicon);
    const auto peaks = sentiment::find_peaks(series, config.peak_window, config.peak_prominence);
    return std::make_pair(to_json(series, peaks), sentiment::write_series_csv(series));
  });

  struct CoocStage {
    json section;
    std::string edges_csv, centrality_csv, graphml;
  };
  const auto cooc = in_stage(stage::kCoocnet, observer, [&] {
    const auto g = coocnet::cooccurrence(matrix.trimmed, config.cooc_mode, config.cooc_min_weight);
    const auto table = coocnet::centrality_table(g);
    const auto net = coocnet::to_network(g, table);
    CoocStage s;
    s.section = to_json(g, table);
    s.section["min_weight"] = config.cooc_min_weight;
    s.edges_csv = graph::write_graph(net, graph::GraphFormat::kEdgeCsv);
    s.centrality_csv = graph::write_centrality_csv(net);
    s.graphml = graph::write_graph(net, graph::GraphFormat::kGraphMl);
    return s;
  });

  struct TopicStage {
    topicmodel::TermTopicMatrix ttm;
    json section;
    std::string model;
  };
  const auto topics = in_stage(stage::kTopicModel, observer, [&] {
    const auto model = topicmodel::fit_lda(matrix.trimmed, config.lda);
    TopicStage s;
    s.ttm = topicmodel::top_terms_per_topic(model, config.top_n);
    s.section = to_json(s.ttm);
    s.section["log_likelihood"] = topicmodel::log_likelihood(model, matrix.trimmed);
    s.model = topicmodel::save_model(model);
    return s;
  });

  const auto tnet = in_stage(stage::kTopicNet, observer, [&] {
    const auto g = topicnet::build_bipartite(topics.ttm);
    const auto table = topicnet::bipartite_centrality(g);
    const auto net = topicnet::to_network(g, table);
    CoocStage s;
    s.section = to_json(g, table, topicnet::bridge_terms(g));
    s.edges_csv = graph::write_graph(net, graph::GraphFormat::kEdgeCsv);
    s.centrality_csv = graph::write_centrality_csv(net);
    s.graphml = graph::write_graph(net, graph::GraphFormat::kGraphMl);
    return s;
  });

  return in_stage(stage::kPublish, observer, [&] {
    AnalysisBundle b;
    b.config_hash = config_hash(config);
    const auto corpus_digest = view.digest();
    const auto key = bundle_key(config, corpus_digest, data_dir);
    b.key = key.key;
    const auto& lexicon_digest = key.lexicon_digest;

    const auto stats = corpus::stats_of(view);
    json empty_docs = json::array();
    for (const auto d : matrix.trimmed.zero_rows()) empty_docs.push_back(matrix.trimmed.doc_ids[d]);

    auto& f = b.files;
    f["topterms.json"] = dump({{"terms", to_json(matrix.top)},
                               {"documents", matrix.trimmed.num_docs()},
                               {"vocabulary_size", matrix.trimmed.num_terms()},
                               {"vocabulary_size_untrimmed", matrix.full.num_terms()},
                               {"empty_documents", empty_docs}});
    f["sentiment.json"] = dump(sentiment_json.first);
    f["sentiment.csv"] = sentiment_json.second;
    f["coocnet.json"] = dump(cooc.section);
    f["cooc_edges.csv"] = cooc.edges_csv;
    f["cooc_centrality.csv"] = cooc.centrality_csv;
    f["coocnet.graphml"] = cooc.graphml;
    f["topics.json"] = dump(topics.section);
    f["lda_model.txt"] = topics.model;
    f["topicnet.json"] = dump(tnet.section);
    f["topicnet_edges.csv"] = tnet.edges_csv;
    f["topicnet_centrality.csv"] = tnet.centrality_csv;
    f["topicnet.graphml"] = tnet.graphml;
    f["dtm_triplets.tsv"] = dtm::write_triplets(matrix.trimmed);
    f["dtm_vocabulary.txt"] = dtm::write_vocabulary(matrix.trimmed);

    json manifest;
    manifest["format"] = "cometa-bundle/1";
    manifest["engine_version"] = std::string(kVersion);
    manifest["key"] = b.key;
    manifest["config_hash"] = b.config_hash;
    manifest["config"] = config_to_json(config);
    manifest["corpus"] = {{"id", view.corpus_id()},
                          {"digest", corpus_digest},
                          {"documents", view.size()},
                          {"lexicon_digest", lexicon_digest}};
    manifest["stats"] = to_json(stats);
    // Data timestamps only: wall-clock times would break byte-identical reruns.
    manifest["timestamps"] = {
        {"data_from", stats.date_range ? json(stats.date_range->first.to_string()) : json(nullptr)},
        {"data_to", stats.date_range ? json(stats.date_range->second.to_string()) : json(nullptr)}};
    json sections = json::object();
    for (const auto s : kSections) sections[std::string(s)] = std::string(s) + ".json";
    manifest["sections"] = sections;
    json digests = json::object();
    for (const auto& [name, bytes] : f) digests[name] = sha256_hex(bytes);
    manifest["files"] = digests;
    f["manifest.json"] = dump(manifest);
    return b;
  });
}

AnalysisBundle run_pipeline(const corpus::CorpusStore& store, const BundleStore& bundles,
                            const PipelineConfig& config, const StageObserver& observer) {
  const auto view = in_stage(stage::kCorpus, observer, [&] {
    config.validate();
    return store.filter_corpus(config.corpus_id, config.filter);
  });

  // The key depends on config, snapshot and lexicon only; check the cache
  // before doing any real work.
  const auto cached_key = in_stage(stage::kCorpus, observer, [&] {
    return bundle_key(config, view.digest(), store.root()).key;
  });
  if (auto hit = bundles.load(cached_key)) return std::move(*hit);

  auto bundle = compute_bundle(view, config, store.root(), observer);
  in_stage(stage::kPublish, observer, [&] {
    bundles.publish(bundle);
    return 0;
  });
  return bundle;
}

}  // namespace cometa::pipeline
