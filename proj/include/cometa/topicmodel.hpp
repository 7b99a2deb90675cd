#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cometa/dtm.hpp"

namespace cometa::topicmodel {

struct LdaConfig {
  std::size_t topics = 5;
  std::optional<double> alpha;  // document-topic prior; 50 / topics when unset
  double beta = 0.01;           // topic-word prior
  std::size_t iterations = 1000;
  std::size_t burn_in = 200;
  std::size_t sample_lag = 10;  // sweeps between averaged samples
  std::uint64_t seed = 42;

  double effective_alpha() const {
    return alpha ? *alpha : 50.0 / static_cast<double>(topics);
  }
  /// Field-level checks; the vocabulary-dependent check happens in fit_lda.
  void validate() const;
};

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct LdaModel {
  LdaConfig config;
  std::vector<std::string> vocabulary;
  std::vector<std::string> doc_ids;
  Matrix phi;    // topics x terms
  Matrix theta;  // documents x topics
  /// Topic of every token, per document, in the sampler's token order
  /// (terms ascending, each repeated by its count). May be empty after load.
  std::vector<std::vector<std::uint32_t>> assignments;

  std::size_t num_topics() const { return phi.rows; }
};

/// Read-only view of the sampler after a sweep.
struct SamplerState {
  std::size_t iteration = 0;  // 1-based sweep number
  std::size_t topics = 0;
  std::size_t terms = 0;
  std::span<const std::uint32_t> doc_topic;    // D x K counts
  std::span<const std::uint32_t> topic_word;   // K x V counts
  std::span<const std::uint32_t> topic_total;  // K counts
  std::span<const std::uint32_t> token_terms;  // term of every token
  std::span<const std::uint32_t> token_topics;
  std::span<const std::size_t> doc_offsets;  // D + 1 token offsets
};

using SweepObserver = std::function<void(const SamplerState&)>;

/// Collapsed Gibbs sampling with p(z = k) proportional to
/// (n_dk + alpha) * (n_kv + beta) / (n_k + V * beta).
///
/// phi and theta are averages of the smoothed estimates taken every
/// `sample_lag` sweeps after burn-in (the final state alone if no sweep
/// qualifies). Output is a pure function of (dtm, config).
LdaModel fit_lda(const dtm::DocumentTermMatrix& dtm, const LdaConfig& config,
                 const SweepObserver& observer = {});

struct TermTopicMatrix {
  std::vector<std::string> terms;  // union of selected terms, sorted
  std::vector<std::size_t> topics;
  /// Per topic, its selected terms by descending weight (ties by term).
  std::vector<std::vector<std::pair<std::string, double>>> per_topic;
  std::map<std::pair<std::string, std::size_t>, double> weight;
};

TermTopicMatrix top_terms_per_topic(const LdaModel& model, std::size_t n = 20);

std::span<const double> doc_topic(const LdaModel& model, std::size_t doc_index);

/// Sum over tokens of log sum_k theta[d][k] * phi[k][v]. The DTM must carry
/// the model's vocabulary and documents.
double log_likelihood(const LdaModel& model, const dtm::DocumentTermMatrix& dtm);

/// Versioned text container; doubles are written in shortest round-trip form
/// so save(load(x)) == x.
std::string save_model(const LdaModel& model, bool with_assignments = false);
LdaModel load_model(std::string_view text);

}  // namespace cometa::topicmodel
