#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cometa/corpus_store.hpp"
#include "cometa/coocnet.hpp"
#include "cometa/dtm.hpp"
#include "cometa/preprocess.hpp"
#include "cometa/sentiment.hpp"
#include "cometa/topicmodel.hpp"
#include "cometa/topicnet.hpp"

namespace cometa::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

/// Stage names reported in progress callbacks and errors.
namespace stage {
inline constexpr std::string_view kCorpus = "corpus_store";
inline constexpr std::string_view kPreprocess = "preprocess";
inline constexpr std::string_view kDtm = "dtm";
inline constexpr std::string_view kSentiment = "sentiment";
inline constexpr std::string_view kCoocnet = "coocnet";
inline constexpr std::string_view kTopicModel = "topicmodel";
inline constexpr std::string_view kTopicNet = "topicnet";
inline constexpr std::string_view kPublish = "publish";
}  // namespace stage

/// Section names served per bundle.
inline constexpr std::string_view kSections[] = {"topterms", "sentiment", "coocnet", "topics",
                                                 "topicnet"};

struct PreprocessSettings {
  std::string language = "en";
  bool lowercase = true;
  bool strip_punctuation = true;
  bool strip_digits = true;
  std::size_t min_token_len = 2;
  std::vector<std::string> extra_stopwords;
  std::optional<std::string> stopwords_file;  // replaces the bundled list
};

struct PipelineConfig {
  std::string corpus_id;
  corpus::CorpusFilter filter;
  PreprocessSettings preprocess;
  double max_sparsity = 0.99;
  /// A lexicon file, or `builtin:en` / `builtin:it`. Relative paths are
  /// resolved against the data directory first, then the working directory.
  std::string lexicon = "builtin:en";
  coocnet::CoocMode cooc_mode = coocnet::CoocMode::kBinary;
  std::uint64_t cooc_min_weight = 2;
  topicmodel::LdaConfig lda;
  std::size_t top_n = 20;      // terms per topic
  std::size_t top_terms = 50;  // frequency ranking length
  std::size_t peak_window = 3;
  double peak_prominence = 0.0;

  void validate() const;
};

/// Missing fields take defaults; unknown fields are a configuration Error.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& config);

/// SHA-256 of the canonical (sorted-key, compact) config JSON.
std::string config_hash(const PipelineConfig& config);

/// Finished analysis: a set of named files, one of which is manifest.json.
/// The key addresses config, corpus snapshot and lexicon content together.
struct AnalysisBundle {
  std::string key;
  std::string config_hash;
  std::map<std::string, std::string> files;

  nlohmann::json manifest() const;
  /// Parsed `<name>.json`; throws not-found for an unknown section.
  nlohmann::json section(std::string_view name) const;
  const std::string& section_bytes(std::string_view name) const;
};

/// Content-addressed bundle directories under `<root>/bundles/<key>/`.
/// A bundle is published by renaming a complete temporary directory, so a
/// reader never observes a partial bundle.
class BundleStore {
 public:
  explicit BundleStore(std::filesystem::path root);

  std::optional<AnalysisBundle> load(const std::string& key) const;
  void publish(const AnalysisBundle& bundle) const;
  bool contains(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

using StageObserver = std::function<void(std::string_view stage)>;

/// Loads the lexicon named by `config.lexicon`.
sentiment::Lexicon resolve_lexicon(const PipelineConfig& config,
                                   const std::filesystem::path& data_dir);
preprocess::PreprocessConfig resolve_preprocess(const PipelineConfig& config,
                                                const std::filesystem::path& data_dir);

/// Computes every section from one snapshot without touching storage.
AnalysisBundle compute_bundle(const corpus::CorpusView& view, const PipelineConfig& config,
                              const std::filesystem::path& data_dir,
                              const StageObserver& observer = {});

/// Snapshots the corpus, then returns the cached bundle for (config, corpus,
/// lexicon) if one exists, otherwise computes and publishes it. Failures
/// surface as StageError and nothing is persisted.
AnalysisBundle run_pipeline(const corpus::CorpusStore& store, const BundleStore& bundles,
                            const PipelineConfig& config, const StageObserver& observer = {});

// Section serializers, shared with callers that rebuild sections by hand.
nlohmann::json to_json(const corpus::CorpusStats& stats);
nlohmann::json to_json(const std::vector<dtm::TermFrequency>& terms);
nlohmann::json to_json(const sentiment::SentimentSeries& series, const std::vector<Date>& peaks);
nlohmann::json to_json(const coocnet::CoocGraph& graph, const coocnet::CentralityTable& table);
nlohmann::json to_json(const topicmodel::TermTopicMatrix& ttm);
nlohmann::json to_json(const topicnet::BipartiteGraph& graph,
                       const topicnet::BipartiteCentrality& table,
                       const std::vector<topicnet::BridgeTerm>& bridges);

}  // namespace cometa::pipeline
