// cometa: command-line front end. Every HTTP endpoint has a subcommand here.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cometa/error.hpp"
#include "cometa/pipeline.hpp"
#include "cometa/service.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cometa;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << bytes;
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
    case ErrorKind::kInvalidInput: return 2;
    case ErrorKind::kNotFound: return 3;
    case ErrorKind::kEmptyCorpus:
    case ErrorKind::kDegenerateGraph: return 4;
    case ErrorKind::kRetryable: return 75;  // EX_TEMPFAIL
    case ErrorKind::kIo: return 1;
  }
  return 1;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("COMETA_DATA_DIR"); env && *env) return env;
  return "cometa-data";
}

// Options shared by the per-module subcommands.
struct CorpusOptions {
  std::string corpus;
  std::string lang = "en";
  std::string stopwords;
  std::vector<std::string> sources;
  std::string from, to;
  double max_sparsity = 0.99;
};

void add_corpus_options(CLI::App* cmd, CorpusOptions& o, bool with_sparsity) {
  cmd->add_option("--corpus", o.corpus, "Corpus id")->required();
  cmd->add_option("--lang", o.lang, "Corpus language")->capture_default_str();
  cmd->add_option("--stopwords", o.stopwords, "Stopword file replacing the bundled list");
  cmd->add_option("--source", o.sources, "Keep only these sources");
  cmd->add_option("--from", o.from, "First date (YYYY-MM-DD)");
  cmd->add_option("--to", o.to, "Last date (YYYY-MM-DD)");
  if (with_sparsity) {
    cmd->add_option("--max-sparsity", o.max_sparsity, "Drop terms sparser than this")
        ->capture_default_str();
  }
}

pipeline::PipelineConfig to_config(const CorpusOptions& o) {
  pipeline::PipelineConfig c;
  c.corpus_id = o.corpus;
  c.filter.sources = {o.sources.begin(), o.sources.end()};
  c.filter.languages = {o.lang};
  auto date = [](const std::string& s) -> std::optional<Date> {
    if (s.empty()) return std::nullopt;
    auto d = Date::parse(s);
    if (!d) throw Error(ErrorKind::kConfiguration, "bad date: " + s);
    return d;
  };
  c.filter.dates = {date(o.from), date(o.to)};
  c.preprocess.language = o.lang;
  if (!o.stopwords.empty()) c.preprocess.stopwords_file = fs::absolute(o.stopwords).string();
  c.max_sparsity = o.max_sparsity;
  return c;
}

std::vector<preprocess::TokenizedDoc> tokenized(const corpus::CorpusStore& store,
                                                const pipeline::PipelineConfig& c) {
  const auto view = store.filter_corpus(c.corpus_id, c.filter);
  if (view.empty()) throw Error(ErrorKind::kEmptyCorpus, "no articles match the corpus filter");
  return preprocess::preprocess_corpus(view, pipeline::resolve_preprocess(c, store.root()));
}

dtm::DocumentTermMatrix trimmed_dtm(const corpus::CorpusStore& store,
                                    const pipeline::PipelineConfig& c) {
  return dtm::trim_sparse(dtm::build_dtm(tokenized(store, c)), c.max_sparsity);
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cometa: news corpus text analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pipeline::kVersion));
  std::string data_dir = default_data_dir();
  app.add_option("--data-dir", data_dir, "Data directory (env COMETA_DATA_DIR)")
      ->capture_default_str();

  // Corpus store.
  std::string corpus_id;
  std::vector<std::string> files;
  auto* ingest = app.add_subcommand("ingest", "Append JSON-lines articles to a corpus");
  ingest->add_option("--corpus", corpus_id, "Corpus id")->required();
  ingest->add_option("files", files, "Input files; '-' or none reads stdin");

  auto* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--corpus", corpus_id, "Corpus id")->required();

  app.add_subcommand("corpora", "List corpora");

  std::string out;
  auto* export_cmd = app.add_subcommand("export", "Write a corpus as normalized JSON lines");
  export_cmd->add_option("--corpus", corpus_id, "Corpus id")->required();
  export_cmd->add_option("--out", out, "Output file (default stdout)");

  // Per-module commands.
  CorpusOptions copts;
  auto* prep = app.add_subcommand("preprocess", "Tokenize a corpus, one JSON line per article");
  add_corpus_options(prep, copts, false);
  prep->add_option("--out", out, "Output file (default stdout)");

  std::size_t top = 50;
  std::string out_dir;
  auto* dtm_cmd = app.add_subcommand("dtm", "Document-term matrix and term frequencies");
  add_corpus_options(dtm_cmd, copts, true);
  dtm_cmd->add_option("--top", top, "Most frequent terms to print")->capture_default_str();
  dtm_cmd->add_option("--out-dir", out_dir, "Write triplets.tsv and vocabulary.txt here");

  std::string lexicon = "builtin:en";
  std::size_t window = 3;
  double prominence = 0.0;
  auto* sent = app.add_subcommand("sentiment", "Daily mean polarity series");
  add_corpus_options(sent, copts, false);
  sent->add_option("--lexicon", lexicon, "Lexicon file or builtin:<lang>")->capture_default_str();
  sent->add_option("--out", out, "CSV output (default stdout)");
  sent->add_option("--window", window, "Peak window")->capture_default_str();
  sent->add_option("--prominence", prominence, "Minimum peak prominence")->capture_default_str();

  std::string mode = "binary";
  std::uint64_t min_weight = 2;
  std::string format = "csv";
  std::string centrality_out;
  auto* cooc = app.add_subcommand("coocnet", "Term co-occurrence network");
  add_corpus_options(cooc, copts, true);
  cooc->add_option("--mode", mode, "binary or count")->capture_default_str();
  cooc->add_option("--min-weight", min_weight, "Drop lighter edges")->capture_default_str();
  cooc->add_option("--format", format, "csv or graphml")->capture_default_str();
  cooc->add_option("--out", out, "Graph output (default stdout)");
  cooc->add_option("--centrality", centrality_out, "Centrality CSV output");

  topicmodel::LdaConfig lda;
  std::optional<double> alpha;
  auto* lda_cmd = app.add_subcommand("lda", "Fit an LDA topic model");
  add_corpus_options(lda_cmd, copts, true);
  lda_cmd->add_option("-k,--topics", lda.topics, "Number of topics")->capture_default_str();
  lda_cmd->add_option("--seed", lda.seed, "Sampler seed")->capture_default_str();
  lda_cmd->add_option("--iters", lda.iterations, "Gibbs sweeps")->capture_default_str();
  lda_cmd->add_option("--burn-in", lda.burn_in, "Sweeps before averaging")->capture_default_str();
  lda_cmd->add_option("--lag", lda.sample_lag, "Sweeps between samples")->capture_default_str();
  lda_cmd->add_option("--alpha", alpha, "Document-topic prior (default 50/k)");
  lda_cmd->add_option("--beta", lda.beta, "Topic-word prior")->capture_default_str();
  lda_cmd->add_option("--top", top, "Terms per topic to print");
  lda_cmd->add_option("--out", out, "Model output file");
  bool with_assignments = false;
  lda_cmd->add_flag("--assignments", with_assignments, "Store token assignments in the model");

  std::string model_path;
  auto* tnet = app.add_subcommand("topicnet", "Topics-terms network from a saved model");
  tnet->add_option("--model", model_path, "Model file written by 'lda'")->required();
  tnet->add_option("--top", top, "Terms per topic")->capture_default_str();
  tnet->add_option("--format", format, "csv or graphml")->capture_default_str();
  tnet->add_option("--out", out, "Graph output (default stdout)");
  tnet->add_option("--centrality", centrality_out, "Centrality CSV output");
  bool weighted = false;
  tnet->add_flag("--weighted", weighted, "Closeness with edge length 1/phi");

  // Pipeline and service.
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline and publish a bundle");
  run->add_option("--config", config_path, "PipelineConfig JSON")->required();

  std::string key, section;
  auto* bundle = app.add_subcommand("bundle", "Show a bundle manifest or one of its sections");
  bundle->add_option("key", key, "Bundle key")->required();
  bundle->add_option("--section", section, "topterms, sentiment, coocnet, topics or topicnet");

  std::string bind = "127.0.0.1:8080";
  std::size_t workers = 0;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--bind", bind, "host:port")->capture_default_str();
  serve->add_option("--workers", workers, "Job workers (default: cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    corpus::CorpusStore store(data_dir);
    pipeline::BundleStore bundles(data_dir);

    if (*ingest) {
      std::vector<std::string> lines;
      if (files.empty()) files.push_back("-");
      for (const auto& f : files) {
        std::vector<std::string> batch;
        if (f == "-") {
          batch = read_lines(std::cin);
        } else {
          std::ifstream in(f, std::ios::binary);
          if (!in) throw Error(ErrorKind::kNotFound, "cannot read " + f);
          batch = read_lines(in);
        }
        lines.insert(lines.end(), batch.begin(), batch.end());
      }
      const auto report = store.ingest_documents(lines, corpus_id);
      for (const auto& r : report.rejections) {
        std::cerr << "rejected record " << r.record << (r.id.empty() ? "" : " (" + r.id + ")")
                  << ": " << r.reason << '\n';
      }
      std::cout << "accepted " << report.accepted << ", rejected " << report.rejected << '\n';
    } else if (*stats) {
      if (!store.exists(corpus_id)) throw Error(ErrorKind::kNotFound, "unknown corpus: " + corpus_id);
      print_json(pipeline::to_json(store.corpus_stats(corpus_id)));
    } else if (app.got_subcommand("corpora")) {
      for (const auto& id : store.list_corpora()) std::cout << id << '\n';
    } else if (*export_cmd) {
      write_output(out, store.export_jsonl(corpus_id));
    } else if (*prep) {
      std::string text;
      for (const auto& d : tokenized(store, to_config(copts))) {
        text += json({{"id", d.article_id},
                      {"published_at", d.published_at.to_string()},
                      {"tokens", d.tokens}})
                    .dump() +
                '\n';
      }
      write_output(out, text);
    } else if (*dtm_cmd) {
      const auto m = trimmed_dtm(store, to_config(copts));
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_output((fs::path(out_dir) / "triplets.tsv").string(), dtm::write_triplets(m));
        write_output((fs::path(out_dir) / "vocabulary.txt").string(), dtm::write_vocabulary(m));
      }
      std::cerr << m.num_docs() << " documents, " << m.num_terms() << " terms\n";
      for (const auto& t : dtm::top_terms(m, top)) {
        std::cout << t.term << '\t' << t.total_count << '\t' << t.doc_count << '\n';
      }
    } else if (*sent) {
      auto c = to_config(copts);
      c.lexicon = lexicon;
      const auto docs = tokenized(store, c);
      const auto series = sentiment::sentiment_series(docs, pipeline::resolve_lexicon(c, store.root()));
      write_output(out, sentiment::write_series_csv(series));
      for (const auto d : sentiment::find_peaks(series, window, prominence)) {
        std::cerr << "peak " << d.to_string() << '\n';
      }
    } else if (*cooc) {
      const auto g = coocnet::cooccurrence(trimmed_dtm(store, to_config(copts)),
                                           coocnet::parse_mode(mode), min_weight);
      const auto table = coocnet::centrality_table(g);
      write_output(out, coocnet::export_graph(g, table, graph::parse_graph_format(format)));
      if (!centrality_out.empty()) {
        write_output(centrality_out, graph::write_centrality_csv(coocnet::to_network(g, table)));
      }
    } else if (*lda_cmd) {
      lda.alpha = alpha;
      const auto m = trimmed_dtm(store, to_config(copts));
      const auto model = topicmodel::fit_lda(m, lda);
      if (!out.empty()) write_output(out, topicmodel::save_model(model, with_assignments));
      const auto ttm = topicmodel::top_terms_per_topic(model, *lda_cmd->get_option("--top") ? top : 10);
      for (std::size_t i = 0; i < ttm.per_topic.size(); ++i) {
        std::cout << topicnet::topic_label(ttm.topics[i]) << ':';
        for (const auto& [term, w] : ttm.per_topic[i]) std::cout << ' ' << term;
        std::cout << '\n';
      }
    } else if (*tnet) {
      const auto model = topicmodel::load_model(read_file(model_path));
      const auto g = topicnet::build_bipartite(topicmodel::top_terms_per_topic(model, top));
      const auto table = topicnet::bipartite_centrality(g, weighted);
      const auto net = topicnet::to_network(g, table);
      write_output(out, graph::write_graph(net, graph::parse_graph_format(format)));
      if (!centrality_out.empty()) write_output(centrality_out, graph::write_centrality_csv(net));
      for (const auto& b : topicnet::bridge_terms(g)) {
        std::cerr << "bridge " << b.term << ':';
        for (const auto k : b.topics) std::cerr << ' ' << topicnet::topic_label(k);
        std::cerr << '\n';
      }
    } else if (*run) {
      const auto config = pipeline::config_from_json(json::parse(read_file(config_path)));
      const auto b = pipeline::run_pipeline(store, bundles, config, [](std::string_view s) {
        std::cerr << "stage " << s << '\n';
      });
      std::cout << b.key << '\n';
    } else if (*bundle) {
      const auto b = bundles.load(key);
      if (!b) throw Error(ErrorKind::kNotFound, "unknown bundle: " + key);
      std::cout << (section.empty() ? b->files.at("manifest.json") : b->section_bytes(section));
    } else if (*serve) {
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorKind::kConfiguration, "--bind wants host:port");
      const auto host = bind.substr(0, colon);
      const int port = std::stoi(bind.substr(colon + 1));
      service::Service svc({data_dir, workers});
      const int bound = svc.bind(host, port);
      std::cerr << "cometa " << pipeline::kVersion << " serving " << fs::absolute(data_dir).string()
                << " on " << host << ':' << bound << '\n';
      svc.listen();
    }
  } catch (const StageError& e) {
    std::cerr << "cometa: " << e.stage() << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const Error& e) {
    std::cerr << "cometa: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "cometa: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
