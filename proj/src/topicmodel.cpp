#include "cometa/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cometa/digest.hpp"
#include "cometa/error.hpp"
#include "cometa/rng.hpp"

namespace cometa::topicmodel {

void LdaConfig::validate() const {
  if (topics < 1) throw Error(ErrorKind::kConfiguration, "topic count must be at least 1");
  if (alpha && !(*alpha > 0.0)) throw Error(ErrorKind::kConfiguration, "alpha must be > 0");
  if (!(beta > 0.0)) throw Error(ErrorKind::kConfiguration, "beta must be > 0");
  if (iterations < 1) throw Error(ErrorKind::kConfiguration, "iterations must be at least 1");
  if (iterations <= burn_in) {
    throw Error(ErrorKind::kConfiguration, "iterations must exceed burn_in");
  }
  if (sample_lag < 1) throw Error(ErrorKind::kConfiguration, "sample_lag must be at least 1");
}

namespace {

class GibbsSampler {
 public:
  GibbsSampler(const dtm::DocumentTermMatrix& dtm, const LdaConfig& config)
      : K_(config.topics),
        V_(dtm.num_terms()),
        D_(dtm.num_docs()),
        alpha_(config.effective_alpha()),
        beta_(config.beta),
        rng_(config.seed),
        doc_topic_(D_ * K_, 0),
        topic_word_(K_ * V_, 0),
        topic_total_(K_, 0),
        weights_(K_, 0.0) {
    doc_offsets_.reserve(D_ + 1);
    doc_offsets_.push_back(0);
    for (std::size_t d = 0; d < D_; ++d) {
      for (const auto& e : dtm.row(d)) token_terms_.insert(token_terms_.end(), e.count, e.term);
      doc_offsets_.push_back(token_terms_.size());
    }
    token_topics_.resize(token_terms_.size());
    for (std::size_t d = 0; d < D_; ++d) {
      for (std::size_t i = doc_offsets_[d]; i < doc_offsets_[d + 1]; ++i) {
        const auto k = static_cast<std::uint32_t>(rng_.below(K_));
        token_topics_[i] = k;
        ++doc_topic_[d * K_ + k];
        ++topic_word_[k * V_ + token_terms_[i]];
        ++topic_total_[k];
      }
    }
  }

  void sweep() {
    const double v_beta = static_cast<double>(V_) * beta_;
    for (std::size_t d = 0; d < D_; ++d) {
      std::uint32_t* nd = doc_topic_.data() + d * K_;
      for (std::size_t i = doc_offsets_[d]; i < doc_offsets_[d + 1]; ++i) {
        const std::uint32_t v = token_terms_[i];
        std::uint32_t k = token_topics_[i];
        --nd[k];
        --topic_word_[k * V_ + v];
        --topic_total_[k];

        double total = 0.0;
        for (std::size_t t = 0; t < K_; ++t) {
          total += (nd[t] + alpha_) * (topic_word_[t * V_ + v] + beta_) /
                   (topic_total_[t] + v_beta);
          weights_[t] = total;
        }
        const double u = rng_.uniform() * total;
        k = 0;
        while (k + 1 < K_ && weights_[k] <= u) ++k;

        token_topics_[i] = k;
        ++nd[k];
        ++topic_word_[k * V_ + v];
        ++topic_total_[k];
      }
    }
  }

  // Adds the current smoothed estimates into the running sums.
  void accumulate(Matrix& phi, Matrix& theta) const {
    const double v_beta = static_cast<double>(V_) * beta_;
    const double k_alpha = static_cast<double>(K_) * alpha_;
    for (std::size_t k = 0; k < K_; ++k) {
      const double denom = topic_total_[k] + v_beta;
      for (std::size_t v = 0; v < V_; ++v) phi(k, v) += (topic_word_[k * V_ + v] + beta_) / denom;
    }
    for (std::size_t d = 0; d < D_; ++d) {
      const double denom = static_cast<double>(doc_offsets_[d + 1] - doc_offsets_[d]) + k_alpha;
      for (std::size_t k = 0; k < K_; ++k) theta(d, k) += (doc_topic_[d * K_ + k] + alpha_) / denom;
    }
  }

  SamplerState state(std::size_t iteration) const {
    return {iteration,   K_,           V_,           doc_topic_,
            topic_word_, topic_total_, token_terms_, token_topics_,
            doc_offsets_};
  }

  std::vector<std::vector<std::uint32_t>> assignments() const {
    std::vector<std::vector<std::uint32_t>> out(D_);
    for (std::size_t d = 0; d < D_; ++d) {
      out[d].assign(token_topics_.begin() + static_cast<std::ptrdiff_t>(doc_offsets_[d]),
                    token_topics_.begin() + static_cast<std::ptrdiff_t>(doc_offsets_[d + 1]));
    }
    return out;
  }

 private:
  std::size_t K_, V_, D_;
  double alpha_, beta_;
  Rng rng_;
  std::vector<std::uint32_t> token_terms_;
  std::vector<std::uint32_t> token_topics_;
  std::vector<std::size_t> doc_offsets_;
  std::vector<std::uint32_t> doc_topic_;
  std::vector<std::uint32_t> topic_word_;
  std::vector<std::uint32_t> topic_total_;
  std::vector<double> weights_;
};

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) sum += m(r, c);
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) /= sum;
  }
}

}  // namespace

LdaModel fit_lda(const dtm::DocumentTermMatrix& dtm, const LdaConfig& config,
                 const SweepObserver& observer) {
  config.validate();
  if (config.topics > dtm.num_terms()) {
    throw Error(ErrorKind::kConfiguration,
                "topic count " + std::to_string(config.topics) + " exceeds vocabulary size " +
                    std::to_string(dtm.num_terms()));
  }
  GibbsSampler sampler(dtm, config);
  Matrix phi(config.topics, dtm.num_terms());
  Matrix theta(dtm.num_docs(), config.topics);
  std::size_t samples = 0;
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    sampler.sweep();
    if (observer) observer(sampler.state(it));
    if (it > config.burn_in && (it - config.burn_in) % config.sample_lag == 0) {
      sampler.accumulate(phi, theta);
      ++samples;
    }
  }
  if (samples == 0) sampler.accumulate(phi, theta);
  // Renormalizing the averaged rows removes accumulated rounding error.
  normalize_rows(phi);
  normalize_rows(theta);

  LdaModel model;
  model.config = config;
  model.vocabulary = dtm.vocabulary;
  model.doc_ids = dtm.doc_ids;
  model.phi = std::move(phi);
  model.theta = std::move(theta);
  model.assignments = sampler.assignments();
  return model;
}

TermTopicMatrix top_terms_per_topic(const LdaModel& model, std::size_t n) {
  TermTopicMatrix out;
  const std::size_t K = model.num_topics();
  const std::size_t V = model.vocabulary.size();
  const std::size_t take = std::min(n, V);
  std::vector<std::size_t> order(V);
  for (std::size_t k = 0; k < K; ++k) {
    out.topics.push_back(k);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), [&](std::size_t a, std::size_t b) {
                        if (model.phi(k, a) != model.phi(k, b)) {
                          return model.phi(k, a) > model.phi(k, b);
                        }
                        return model.vocabulary[a] < model.vocabulary[b];
                      });
    auto& list = out.per_topic.emplace_back();
    for (std::size_t i = 0; i < take; ++i) {
      const auto& term = model.vocabulary[order[i]];
      const double w = model.phi(k, order[i]);
      list.emplace_back(term, w);
      out.weight[{term, k}] = w;
      out.terms.push_back(term);
    }
  }
  std::sort(out.terms.begin(), out.terms.end());
  out.terms.erase(std::unique(out.terms.begin(), out.terms.end()), out.terms.end());
  return out;
}

std::span<const double> doc_topic(const LdaModel& model, std::size_t doc_index) {
  if (doc_index >= model.theta.rows) {
    throw Error(ErrorKind::kInvalidInput, "document index " + std::to_string(doc_index) +
                                              " out of range");
  }
  return model.theta.row(doc_index);
}

double log_likelihood(const LdaModel& model, const dtm::DocumentTermMatrix& dtm) {
  if (dtm.vocabulary != model.vocabulary) {
    throw Error(ErrorKind::kInvalidInput, "vocabulary of the DTM does not match the model");
  }
  if (dtm.num_docs() != model.theta.rows) {
    throw Error(ErrorKind::kInvalidInput, "document count of the DTM does not match the model");
  }
  const std::size_t K = model.num_topics();
  double total = 0.0;
  for (std::size_t d = 0; d < dtm.num_docs(); ++d) {
    for (const auto& e : dtm.row(d)) {
      double p = 0.0;
      for (std::size_t k = 0; k < K; ++k) p += model.theta(d, k) * model.phi(k, e.term);
      total += static_cast<double>(e.count) * std::log(p);
    }
  }
  return total;
}

std::string save_model(const LdaModel& model, bool with_assignments) {
  const auto& c = model.config;
  std::ostringstream out;
  out << "cometa-lda 1\n";
  out << "topics " << c.topics << '\n';
  out << "alpha " << (c.alpha ? format_double(*c.alpha) : std::string("auto")) << '\n';
  out << "beta " << format_double(c.beta) << '\n';
  out << "iterations " << c.iterations << '\n';
  out << "burn_in " << c.burn_in << '\n';
  out << "sample_lag " << c.sample_lag << '\n';
  out << "seed " << c.seed << '\n';
  out << "vocabulary " << model.vocabulary.size() << '\n';
  for (const auto& t : model.vocabulary) out << t << '\n';
  out << "documents " << model.doc_ids.size() << '\n';
  for (const auto& d : model.doc_ids) out << d << '\n';
  auto write_matrix = [&](const char* name, const Matrix& m) {
    out << name << ' ' << m.rows << ' ' << m.cols << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t col = 0; col < m.cols; ++col) {
        if (col) out << ' ';
        out << format_double(m(r, col));
      }
      out << '\n';
    }
  };
  write_matrix("phi", model.phi);
  write_matrix("theta", model.theta);
  if (with_assignments && !model.assignments.empty()) {
    out << "assignments " << model.assignments.size() << '\n';
    for (const auto& doc : model.assignments) {
      out << doc.size();
      for (const auto z : doc) out << ' ' << z;
      out << '\n';
    }
  } else {
    out << "assignments none\n";
  }
  return out.str();
}

LdaModel load_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto fail = [](const std::string& what) -> Error {
    return Error(ErrorKind::kInvalidInput, "bad model file: " + what);
  };
  std::string line;
  if (!std::getline(in, line) || line != "cometa-lda 1") throw fail("unknown header");
  auto keyed = [&](const char* key) {
    if (!std::getline(in, line)) throw fail(std::string("missing ") + key);
    const std::string prefix = std::string(key) + ' ';
    if (!line.starts_with(prefix)) throw fail(std::string("expected ") + key);
    return line.substr(prefix.size());
  };
  auto number = [&](const char* key) { return std::stoull(keyed(key)); };

  LdaModel m;
  try {
    m.config.topics = number("topics");
    const auto alpha = keyed("alpha");
    if (alpha != "auto") m.config.alpha = std::stod(alpha);
    m.config.beta = std::stod(keyed("beta"));
    m.config.iterations = number("iterations");
    m.config.burn_in = number("burn_in");
    m.config.sample_lag = number("sample_lag");
    m.config.seed = number("seed");
    const auto V = number("vocabulary");
    for (std::size_t i = 0; i < V && std::getline(in, line); ++i) m.vocabulary.push_back(line);
    const auto D = number("documents");
    for (std::size_t i = 0; i < D && std::getline(in, line); ++i) m.doc_ids.push_back(line);
    auto read_matrix = [&](const char* name, Matrix& mat) {
      std::istringstream dims(keyed(name));
      std::size_t rows = 0, cols = 0;
      dims >> rows >> cols;
      mat = Matrix(rows, cols);
      for (auto& v : mat.values) {
        std::string tok;
        if (!(in >> tok)) throw fail(std::string("truncated ") + name);
        v = std::stod(tok);
      }
      std::getline(in, line);
    };
    read_matrix("phi", m.phi);
    read_matrix("theta", m.theta);
    const auto assignments = keyed("assignments");
    if (assignments != "none") {
      m.assignments.resize(std::stoull(assignments));
      for (auto& doc : m.assignments) {
        std::size_t len = 0;
        in >> len;
        doc.resize(len);
        for (auto& z : doc) in >> z;
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what());
  }
  if (m.phi.rows != m.config.topics || m.phi.cols != m.vocabulary.size() ||
      m.theta.rows != m.doc_ids.size() || m.theta.cols != m.config.topics) {
    throw fail("inconsistent dimensions");
  }
  return m;
}

}  // namespace cometa::topicmodel
