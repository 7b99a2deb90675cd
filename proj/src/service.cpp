#include "cometa/service.hpp"

#include <unistd.h>

#include <httplib.h>

#include "cometa/error.hpp"

namespace cometa::service {

using json = nlohmann::json;

std::string_view to_string(JobState state) {
  switch (state) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "unknown";
}

json to_json(const JobStatus& s) {
  json j = {{"id", s.id}, {"state", std::string(to_string(s.state))}};
  if (!s.stage.empty()) j["stage"] = s.stage;
  if (!s.bundle_key.empty()) j["bundle_key"] = s.bundle_key;
  if (s.state == JobState::kFailed) j["message"] = s.message;
  return j;
}

JobRegistry::JobRegistry(const corpus::CorpusStore& store, const pipeline::BundleStore& bundles,
                         std::size_t workers)
    : store_(store), bundles_(bundles) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { work(); });
}

JobRegistry::~JobRegistry() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  queued_.notify_all();
  for (auto& t : workers_) t.join();
}

std::string JobRegistry::submit(pipeline::PipelineConfig config) {
  std::lock_guard lock(mutex_);
  char id[32];
  std::snprintf(id, sizeof id, "job-%06zu", next_id_++);
  jobs_[id] = Job{JobStatus{id, JobState::kQueued, "", "", ""}, std::move(config)};
  queue_.push_back(id);
  queued_.notify_one();
  return id;
}

JobStatus JobRegistry::job_status(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorKind::kNotFound, "unknown job: " + id);
  return it->second.status;
}

JobStatus JobRegistry::wait(const std::string& id) const {
  std::unique_lock lock(mutex_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) throw Error(ErrorKind::kNotFound, "unknown job: " + id);
  changed_.wait(lock, [&] {
    return it->second.status.state == JobState::kDone ||
           it->second.status.state == JobState::kFailed;
  });
  return it->second.status;
}

void JobRegistry::update(const std::string& id, const std::function<void(JobStatus&)>& change) {
  {
    std::lock_guard lock(mutex_);
    change(jobs_.at(id).status);
  }
  changed_.notify_all();
}

void JobRegistry::work() {
  for (;;) {
    std::string id;
    pipeline::PipelineConfig config;
    {
      std::unique_lock lock(mutex_);
      queued_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      config = jobs_.at(id).config;
    }
    update(id, [](JobStatus& s) { s.state = JobState::kRunning; });
    try {
      const auto bundle = pipeline::run_pipeline(store_, bundles_, config, [&](std::string_view st) {
        update(id, [&](JobStatus& s) { s.stage = std::string(st); });
      });
      update(id, [&](JobStatus& s) {
        s.state = JobState::kDone;
        s.stage.clear();
        s.bundle_key = bundle.key;
      });
    } catch (const StageError& e) {
      update(id, [&](JobStatus& s) {
        s.state = JobState::kFailed;
        s.stage = e.stage();
        s.message = e.what();
      });
    } catch (const std::exception& e) {
      update(id, [&](JobStatus& s) {
        s.state = JobState::kFailed;
        s.message = e.what();
      });
    }
  }
}

namespace {

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kConfiguration:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kEmptyCorpus:
    case ErrorKind::kDegenerateGraph: return 400;
    case ErrorKind::kRetryable: return 503;
    case ErrorKind::kIo: return 500;
  }
  return 500;
}

void problem(httplib::Response& res, int status, std::string_view kind, const std::string& detail,
             const std::string& stage = {}) {
  json body = {{"type", "about:blank"},
               {"title", httplib::status_message(status)},
               {"status", status},
               {"kind", std::string(kind)},
               {"detail", detail}};
  if (!stage.empty()) body["stage"] = stage;
  res.status = status;
  if (status == 503) res.set_header("Retry-After", "1");
  res.set_content(body.dump(), "application/problem+json");
}

void reply(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler, mapping library errors onto problem responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const StageError& e) {
    problem(res, http_status(e.kind()), to_string(e.kind()), e.what(), e.stage());
  } catch (const Error& e) {
    problem(res, http_status(e.kind()), to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    problem(res, 400, "invalid-input", e.what());
  } catch (const std::exception& e) {
    problem(res, 500, "internal", e.what());
  }
}

std::vector<std::string> split_lines(const std::string& body) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto nl = body.find('\n', pos);
    if (nl == std::string::npos) nl = body.size();
    std::string line = body.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

json to_json(const corpus::IngestReport& r) {
  json rejections = json::array();
  for (const auto& x : r.rejections) {
    rejections.push_back({{"record", x.record}, {"id", x.id}, {"reason", x.reason}});
  }
  return {{"accepted", r.accepted}, {"rejected", r.rejected}, {"rejections", rejections}};
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(options_.data_dir, ec);
  if (!fs::is_directory(options_.data_dir)) {
    throw Error(ErrorKind::kIo, "data directory is not usable: " + options_.data_dir.string() +
                                    (ec ? " (" + ec.message() + ")" : ""));
  }
  if (::access(options_.data_dir.c_str(), R_OK | W_OK | X_OK) != 0) {
    throw Error(ErrorKind::kIo,
                "data directory is not readable and writable: " + options_.data_dir.string());
  }
  store_ = std::make_unique<corpus::CorpusStore>(options_.data_dir);
  bundles_ = std::make_unique<pipeline::BundleStore>(options_.data_dir);
  jobs_ = std::make_unique<JobRegistry>(*store_, *bundles_, options_.workers);
  server_ = std::make_unique<httplib::Server>();
  // The library default adds SO_REUSEPORT, which lets a second instance share
  // a busy port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
  });
  install_routes();
}

Service::~Service() {
  stop();
  jobs_.reset();
}

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port) +
                                    " (address in use or not permitted)");
  }
  return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

void Service::install_routes() {
  auto& srv = *server_;

  // Unmatched routes still answer with a problem body.
  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    problem(res, res.status, res.status == 404 ? "not-found" : "invalid-input",
            "no route for " + req.method + " " + req.path);
  });

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {{"status", "ok"}, {"version", std::string(pipeline::kVersion)}});
  });

  srv.Get("/corpora", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json list = json::array();
      for (const auto& id : store_->list_corpora()) {
        list.push_back({{"id", id}, {"total", store_->corpus_stats(id).total}});
      }
      reply(res, {{"corpora", list}});
    });
  });

  srv.Get(R"(/corpora/([^/]+)/stats)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      if (!store_->exists(id)) throw Error(ErrorKind::kNotFound, "unknown corpus: " + id);
      auto body = pipeline::to_json(store_->corpus_stats(id));
      body["corpus_id"] = id;
      reply(res, body);
    });
  });

  srv.Post(R"(/corpora/([^/]+)/documents)",
           [this](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const std::string id = req.matches[1];
               const auto lines = split_lines(req.body);
               reply(res, to_json(store_->ingest_documents(lines, id)));
             });
           });

  srv.Post("/analyses", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto config = pipeline::config_from_json(json::parse(req.body));
      if (!store_->exists(config.corpus_id)) {
        throw Error(ErrorKind::kNotFound, "unknown corpus: " + config.corpus_id);
      }
      const auto id = jobs_->submit(config);
      res.set_header("Location", "/analyses/" + id);
      reply(res, {{"id", id}, {"state", "queued"}}, 202);
    });
  });

  // A finished job, or a bundle key from an earlier run of the service.
  auto resolve = [this](const std::string& id) -> std::pair<JobStatus, std::optional<pipeline::AnalysisBundle>> {
    JobStatus status;
    try {
      status = jobs_->job_status(id);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNotFound) throw;
      auto bundle = bundles_->load(id);
      if (!bundle) throw;
      status = JobStatus{id, JobState::kDone, "", id, ""};
      return {status, std::move(bundle)};
    }
    if (status.state != JobState::kDone) return {status, std::nullopt};
    return {status, bundles_->load(status.bundle_key)};
  };

  srv.Get(R"(/analyses/([^/]+))", [resolve](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto [status, bundle] = resolve(req.matches[1]);
      auto body = to_json(status);
      if (bundle) body["bundle"] = bundle->manifest();
      reply(res, body);
    });
  });

  srv.Get(R"(/analyses/([^/]+)/sections/([^/]+))",
          [resolve](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const auto [status, bundle] = resolve(req.matches[1]);
              if (!bundle) {
                problem(res, 409, "not-ready",
                        "analysis is " + std::string(to_string(status.state)), status.stage);
                return;
              }
              res.set_content(bundle->section_bytes(std::string(req.matches[2])),
                              "application/json");
            });
          });
}

}  // namespace cometa::service
