#include <cstdio>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cometa/coocnet.hpp"
#include "cometa/corpus_store.hpp"
#include "cometa/dtm.hpp"
#include "cometa/error.hpp"
#include "cometa/pipeline.hpp"
#include "cometa/preprocess.hpp"
#include "cometa/sentiment.hpp"
#include "cometa/topicmodel.hpp"
#include "cometa/topicnet.hpp"

namespace py = pybind11;
using namespace cometa;

namespace {

using TokenLists = std::vector<std::vector<std::string>>;

std::vector<preprocess::TokenizedDoc> as_docs(const TokenLists& tokens) {
  std::vector<preprocess::TokenizedDoc> docs;
  docs.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "d%06zu", i);
    docs.push_back({id, tokens[i], Date(1970, 1, 1), "en"});
  }
  return docs;
}

dtm::DocumentTermMatrix matrix_of(const TokenLists& tokens, std::optional<double> max_sparsity) {
  auto m = dtm::build_dtm(as_docs(tokens));
  return max_sparsity ? dtm::trim_sparse(m, *max_sparsity) : m;
}

py::list rows_of(const topicmodel::Matrix& m) {
  py::list out;
  for (std::size_t r = 0; r < m.rows; ++r) {
    out.append(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_cometa, m) {
  m.doc() = "News corpus analysis: term statistics, sentiment, networks and topic models";
  m.attr("__version__") = std::string(pipeline::kVersion);

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const StageError& e) {
      error((std::string(e.stage()) + ": " + e.what() + " [" + std::string(to_string(e.kind())) + "]").c_str());
    } catch (const Error& e) {
      error((std::string(e.what()) + " [" + std::string(to_string(e.kind())) + "]").c_str());
    }
  });

  py::class_<corpus::CorpusStore>(m, "CorpusStore")
      .def(py::init<std::filesystem::path>(), py::arg("data_dir"))
      .def(
          "ingest",
          [](corpus::CorpusStore& s, const std::vector<std::string>& records,
             const std::string& corpus_id) {
            const auto r = s.ingest_documents(records, corpus_id);
            py::list rejections;
            for (const auto& x : r.rejections) {
              rejections.append(py::dict(py::arg("record") = x.record, py::arg("id") = x.id,
                                         py::arg("reason") = x.reason));
            }
            return py::dict(py::arg("accepted") = r.accepted, py::arg("rejected") = r.rejected,
                            py::arg("rejections") = rejections);
          },
          py::arg("records"), py::arg("corpus_id"), "Append JSON-lines records to a corpus.")
      .def("corpora", &corpus::CorpusStore::list_corpora)
      .def(
          "stats_json",
          [](const corpus::CorpusStore& s, const std::string& id) {
            return pipeline::to_json(s.corpus_stats(id)).dump();
          },
          py::arg("corpus_id"))
      .def("export_jsonl", &corpus::CorpusStore::export_jsonl, py::arg("corpus_id"));

  m.def(
      "tokenize",
      [](const std::string& text, const std::string& language, std::size_t min_token_len) {
        auto c = preprocess::PreprocessConfig::for_language(language);
        c.min_token_len = min_token_len;
        return preprocess::tokenize(text, c);
      },
      py::arg("text"), py::arg("language") = "en", py::arg("min_token_len") = 2);

  m.def(
      "document_term_matrix",
      [](const TokenLists& docs, std::optional<double> max_sparsity) {
        const auto x = matrix_of(docs, max_sparsity);
        std::vector<std::tuple<std::size_t, std::size_t, std::uint32_t>> triplets;
        for (std::size_t d = 0; d < x.num_docs(); ++d) {
          for (const auto& e : x.row(d)) triplets.emplace_back(d, e.term, e.count);
        }
        return py::make_tuple(x.vocabulary, triplets);
      },
      py::arg("docs"), py::arg("max_sparsity") = py::none(),
      "Vocabulary and (doc, term, count) triplets for token lists.");

  m.def(
      "top_terms",
      [](const TokenLists& docs, std::size_t n) {
        std::vector<std::tuple<std::string, std::uint64_t, std::size_t>> out;
        for (const auto& t : dtm::top_terms(matrix_of(docs, std::nullopt), n)) {
          out.emplace_back(t.term, t.total_count, t.doc_count);
        }
        return out;
      },
      py::arg("docs"), py::arg("n") = 50);

  m.def(
      "score_document",
      [](const std::vector<std::string>& tokens, const std::map<std::string, int>& lexicon) {
        const auto s = sentiment::score_document(tokens, sentiment::Lexicon{"en", lexicon});
        return py::make_tuple(s.score, s.matched);
      },
      py::arg("tokens"), py::arg("lexicon"));

  m.def(
      "cooccurrence",
      [](const TokenLists& docs, const std::string& mode, std::uint64_t min_weight,
         std::optional<double> max_sparsity) {
        const auto g = coocnet::cooccurrence(matrix_of(docs, max_sparsity),
                                             coocnet::parse_mode(mode), min_weight);
        std::vector<std::tuple<std::string, std::string, std::uint64_t>> edges;
        for (const auto& [e, w] : g.edges) edges.emplace_back(g.nodes[e.first], g.nodes[e.second], w);
        return py::make_tuple(g.nodes, edges);
      },
      py::arg("docs"), py::arg("mode") = "binary", py::arg("min_weight") = 1,
      py::arg("max_sparsity") = py::none());

  m.def(
      "network_centrality",
      [](const TokenLists& docs, const std::string& mode, std::uint64_t min_weight) {
        const auto g = coocnet::cooccurrence(matrix_of(docs, std::nullopt),
                                             coocnet::parse_mode(mode), min_weight);
        std::map<std::string, std::pair<double, double>> out;
        for (const auto& r : coocnet::centrality_table(g).rows) {
          out[r.node] = {r.degree_norm, r.closeness_norm};
        }
        return out;
      },
      py::arg("docs"), py::arg("mode") = "binary", py::arg("min_weight") = 1,
      "Normalized (degree, closeness) per term of the co-occurrence network.");

  m.def(
      "fit_lda",
      [](const TokenLists& docs, std::size_t topics, std::uint64_t seed, std::size_t iterations,
         std::size_t burn_in, std::size_t sample_lag, std::optional<double> alpha, double beta) {
        topicmodel::LdaConfig c;
        c.topics = topics;
        c.seed = seed;
        c.iterations = iterations;
        c.burn_in = burn_in;
        c.sample_lag = sample_lag;
        c.alpha = alpha;
        c.beta = beta;
        const auto x = matrix_of(docs, std::nullopt);
        topicmodel::LdaModel model;
        {
          py::gil_scoped_release release;
          model = topicmodel::fit_lda(x, c);
        }
        py::dict out;
        out["vocabulary"] = model.vocabulary;
        out["phi"] = rows_of(model.phi);
        out["theta"] = rows_of(model.theta);
        out["log_likelihood"] = topicmodel::log_likelihood(model, x);
        out["model"] = topicmodel::save_model(model);
        return out;
      },
      py::arg("docs"), py::arg("topics"), py::arg("seed") = 42, py::arg("iterations") = 1000,
      py::arg("burn_in") = 200, py::arg("sample_lag") = 10, py::arg("alpha") = py::none(),
      py::arg("beta") = 0.01);

  m.def(
      "bipartite_centrality",
      [](std::size_t topics, const std::map<std::string, std::set<std::size_t>>& memberships,
         bool weighted) {
        const std::vector<std::pair<std::string, std::set<std::size_t>>> terms(memberships.begin(),
                                                                               memberships.end());
        const auto g = topicnet::from_memberships(topics, terms);
        std::map<std::string, std::pair<double, double>> out;
        for (const auto& r : topicnet::bipartite_centrality(g, weighted).rows) {
          out[r.node] = {r.degree_norm, r.closeness_norm};
        }
        return out;
      },
      py::arg("topics"), py::arg("memberships"), py::arg("weighted") = false,
      "Two-mode (degree, closeness) for topic memberships given as term -> topic ids.");

  m.def(
      "run_pipeline_json",
      [](const std::filesystem::path& data_dir, const std::string& config_json) {
        const auto config = pipeline::config_from_json(nlohmann::json::parse(config_json));
        pipeline::AnalysisBundle b;
        {
          py::gil_scoped_release release;
          corpus::CorpusStore store(data_dir);
          b = pipeline::run_pipeline(store, pipeline::BundleStore(data_dir), config);
        }
        return py::make_tuple(b.key, b.files);
      },
      py::arg("data_dir"), py::arg("config_json"),
      "Runs (or reuses) an analysis and returns its key and file contents.");
}
