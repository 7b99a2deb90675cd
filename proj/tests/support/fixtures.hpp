#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cometa/date.hpp"
#include "cometa/preprocess.hpp"
#include "cometa/rng.hpp"
#include "cometa/sentiment.hpp"

namespace cometa::testing {

// Random variates on top of Rng, so fixtures are identical everywhere.
double normal(Rng& rng);
double gamma(Rng& rng, double shape);
std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration);
std::size_t categorical(Rng& rng, const std::vector<double>& weights);

preprocess::TokenizedDoc make_doc(std::string id, std::vector<std::string> tokens,
                                  Date date = Date(2020, 1, 1));

/// Up to `max_docs` documents over up to `max_terms` terms named t00, t01, ...
/// Some documents may be empty, but never all of them.
std::vector<preprocess::TokenizedDoc> random_corpus(Rng& rng, std::size_t max_docs,
                                                    std::size_t max_terms);

/// Documents drawn from a known LDA model. Topic k puts `support_mass` of its
/// probability on its own block of V / K terms.
struct LdaTruth {
  std::vector<std::string> vocabulary;    // w00, w01, ... (sorted)
  std::vector<std::vector<double>> phi;   // K x V
  std::vector<std::vector<double>> theta; // D x K
  std::vector<preprocess::TokenizedDoc> docs;
};

LdaTruth lda_corpus(std::size_t topics, std::size_t terms, std::size_t docs, std::size_t length,
                    std::uint64_t seed, double support_mass = 0.95, double doc_alpha = 0.3);

/// Term-topic memberships giving a degree grid of fifths: two
/// terms in four topics, three in three, six in two, four in one (K = 5).
std::vector<std::pair<std::string, std::set<std::size_t>>> grid_memberships();

/// Five disjoint vocabulary clusters of eight terms each.
std::vector<std::vector<std::string>> seeded_clusters();

/// Documents dominated by one cluster each, with `noise` of the tokens drawn
/// from other clusters.
std::vector<preprocess::TokenizedDoc> cluster_corpus(
    const std::vector<std::vector<std::string>>& clusters, std::size_t docs, std::size_t length,
    double noise, std::uint64_t seed);

/// Small lexicon and a Jan-Mar 2020 corpus whose daily mean polarity is near
/// zero except for deep troughs on the three marker dates.
sentiment::Lexicon trough_lexicon();
std::vector<preprocess::TokenizedDoc> trough_corpus();
std::vector<Date> trough_dates();

/// English news-like JSON-lines records, one per article.
std::vector<std::string> synthetic_articles(std::size_t count, std::uint64_t seed,
                                            const std::string& id_prefix = "n");

std::string article_json(const std::string& id, const std::string& source,
                         const std::string& language, const std::string& date,
                         const std::string& title, const std::string& body);

}  // namespace cometa::testing
