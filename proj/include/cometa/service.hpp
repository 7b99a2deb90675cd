#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cometa/corpus_store.hpp"
#include "cometa/pipeline.hpp"

namespace httplib {
class Server;
}

namespace cometa::service {

enum class JobState { kQueued, kRunning, kDone, kFailed };

std::string_view to_string(JobState state);

struct JobStatus {
  std::string id;
  JobState state = JobState::kQueued;
  std::string stage;       // current stage while running, failing stage on failure
  std::string bundle_key;  // set when done
  std::string message;     // set on failure
};

nlohmann::json to_json(const JobStatus& status);

/// Asynchronous pipeline jobs on a fixed pool of workers. States only move
/// forward: queued -> running -> done | failed.
class JobRegistry {
 public:
  JobRegistry(const corpus::CorpusStore& store, const pipeline::BundleStore& bundles,
              std::size_t workers);
  ~JobRegistry();
  JobRegistry(const JobRegistry&) = delete;
  JobRegistry& operator=(const JobRegistry&) = delete;

  std::string submit(pipeline::PipelineConfig config);
  /// Throws a not-found Error for an unknown id.
  JobStatus job_status(const std::string& id) const;
  /// Blocks until the job leaves the queued/running states.
  JobStatus wait(const std::string& id) const;

 private:
  struct Job {
    JobStatus status;
    pipeline::PipelineConfig config;
  };

  void work();
  void update(const std::string& id, const std::function<void(JobStatus&)>& change);

  const corpus::CorpusStore& store_;
  const pipeline::BundleStore& bundles_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::condition_variable queued_;
  std::deque<std::string> queue_;
  std::map<std::string, Job> jobs_;
  std::size_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

struct ServiceOptions {
  std::filesystem::path data_dir;
  std::size_t workers = 0;  // 0: one per hardware thread
};

/// HTTP/JSON front end over a data directory.
///
///   GET  /health
///   GET  /corpora
///   GET  /corpora/{id}/stats
///   POST /corpora/{id}/documents        JSON-lines body
///   POST /analyses                      PipelineConfig JSON -> 202 + job id
///   GET  /analyses/{id}
///   GET  /analyses/{id}/sections/{name}
///
/// Errors are problem-details JSON with `stage` and `kind` members.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop() is called.
  void listen();
  void stop();

  corpus::CorpusStore& store() { return *store_; }
  JobRegistry& jobs() { return *jobs_; }

 private:
  void install_routes();

  ServiceOptions options_;
  std::unique_ptr<corpus::CorpusStore> store_;
  std::unique_ptr<pipeline::BundleStore> bundles_;
  std::unique_ptr<JobRegistry> jobs_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace cometa::service
