#include <chrono>
#include <fstream>
#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "cometa/error.hpp"
#include "cometa/service.hpp"
#include "fixtures.hpp"
#include "tempdir.hpp"

using namespace cometa;
using namespace cometa::service;
using json = nlohmann::json;
using testing::article_json;

namespace {

// Service listening on an ephemeral port for the lifetime of the object.
class Running {
 public:
  explicit Running(const std::filesystem::path& dir)
      : service_(ServiceOptions{dir, 2}), port_(service_.bind("127.0.0.1", 0)),
        thread_([this] { service_.listen(); }), client_("127.0.0.1", port_) {
    client_.set_read_timeout(30, 0);
    for (int i = 0; i < 200 && !client_.Get("/health"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  ~Running() {
    service_.stop();
    thread_.join();
  }

  httplib::Client& client() { return client_; }
  int port() const { return port_; }

  json wait_for(const std::string& id) {
    for (int i = 0; i < 3000; ++i) {
      auto res = client_.Get("/analyses/" + id);
      REQUIRE(res);
      auto body = json::parse(res->body);
      if (body.at("state") == "done" || body.at("state") == "failed") return body;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    FAIL("job did not finish");
    return {};
  }

 private:
  Service service_;
  int port_;
  std::thread thread_;
  httplib::Client client_;
};

std::string corpus_body() {
  std::string body;
  for (const auto& line : testing::synthetic_articles(30, 3)) body += line + "\n";
  return body;
}

void expect_problem(const httplib::Result& res, int status, const std::string& kind) {
  REQUIRE(res);
  CHECK(res->status == status);
  CHECK(res->get_header_value("Content-Type") == "application/problem+json");
  const auto body = json::parse(res->body);
  CHECK(body.at("status") == status);
  CHECK(body.at("kind") == kind);
  CHECK(body.contains("detail"));
}

}  // namespace

TEST_CASE("corpus endpoints") {
  testing::TempDir tmp;
  Running s(tmp.path());
  auto& c = s.client();

  const auto health = c.Get("/health");
  REQUIRE(health);
  CHECK(json::parse(health->body).at("status") == "ok");

  CHECK(json::parse(c.Get("/corpora")->body).at("corpora") == json::array());
  expect_problem(c.Get("/corpora/none/stats"), 404, "not-found");

  const auto posted = c.Post("/corpora/news/documents", corpus_body(), "application/x-ndjson");
  REQUIRE(posted);
  CHECK(posted->status == 200);
  CHECK(json::parse(posted->body).at("accepted") == 30);

  const auto again = c.Post("/corpora/news/documents",
                            article_json("n00000", "bbc", "en", "2020-01-01", "t", "b") + "\n" +
                                "{not json}\n" +
                                article_json("x1", "bbc", "de", "2020-01-01", "t", "b") + "\n",
                            "application/x-ndjson");
  const auto report = json::parse(again->body);
  CHECK(report.at("accepted") == 0);
  CHECK(report.at("rejected") == 3);
  CHECK(report.at("rejections").size() == 3);
  CHECK(report.at("rejections")[0].at("id") == "n00000");

  const auto stats = json::parse(c.Get("/corpora/news/stats")->body);
  CHECK(stats.at("corpus_id") == "news");
  CHECK(stats.at("total") == 30);
  const auto list = json::parse(c.Get("/corpora")->body).at("corpora");
  CHECK(list == json::array({{{"id", "news"}, {"total", 30}}}));

  expect_problem(c.Post("/corpora/bad%20id/documents", corpus_body(), "application/x-ndjson"),
                 400, "invalid-input");
  expect_problem(c.Get("/nowhere"), 404, "not-found");
}

TEST_CASE("analysis lifecycle") {
  testing::TempDir tmp;
  Running s(tmp.path());
  auto& c = s.client();
  c.Post("/corpora/news/documents", corpus_body(), "application/x-ndjson");

  const json config = {{"corpus_id", "news"},
                       {"lda", {{"topics", 3}, {"seed", 7}, {"iterations", 100}, {"burn_in", 20}}}};
  const auto submitted = c.Post("/analyses", config.dump(), "application/json");
  REQUIRE(submitted);
  CHECK(submitted->status == 202);
  const auto id = json::parse(submitted->body).at("id").get<std::string>();
  CHECK(submitted->get_header_value("Location") == "/analyses/" + id);

  const auto done = s.wait_for(id);
  REQUIRE(done.at("state") == "done");
  const auto key = done.at("bundle_key").get<std::string>();
  CHECK(done.at("bundle").at("key") == key);
  CHECK(done.at("bundle").at("config").at("lda").at("topics") == 3);

  // Polling a finished job is idempotent.
  CHECK(c.Get("/analyses/" + id)->body == c.Get("/analyses/" + id)->body);

  for (const auto* section : {"topterms", "sentiment", "coocnet", "topics", "topicnet"}) {
    const auto res = c.Get("/analyses/" + id + "/sections/" + section);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "application/json");
    CHECK(json::accept(res->body));
    // The bundle key also addresses the same bytes.
    CHECK(c.Get("/analyses/" + key + "/sections/" + section)->body == res->body);
  }
  const auto topics = json::parse(c.Get("/analyses/" + id + "/sections/topics")->body);
  CHECK(topics.at("topics").size() == 3);
  expect_problem(c.Get("/analyses/" + id + "/sections/nothing"), 404, "not-found");

  // Same config on an unchanged corpus: new job, same bundle.
  const auto repeat = json::parse(c.Post("/analyses", config.dump(), "application/json")->body);
  CHECK(repeat.at("id") != id);
  CHECK(s.wait_for(repeat.at("id")).at("bundle_key") == key);
}

TEST_CASE("failed and malformed analyses") {
  testing::TempDir tmp;
  Running s(tmp.path());
  auto& c = s.client();
  c.Post("/corpora/news/documents", corpus_body(), "application/x-ndjson");

  const json too_many = {{"corpus_id", "news"}, {"lda", {{"topics", 5000}}}};
  const auto submitted = c.Post("/analyses", too_many.dump(), "application/json");
  CHECK(submitted->status == 202);
  const auto id = json::parse(submitted->body).at("id").get<std::string>();
  const auto failed = s.wait_for(id);
  CHECK(failed.at("state") == "failed");
  CHECK(failed.at("stage") == "topicmodel");
  CHECK_FALSE(failed.at("message").get<std::string>().empty());
  CHECK_FALSE(failed.contains("bundle"));
  const auto section = c.Get("/analyses/" + id + "/sections/topics");
  expect_problem(section, 409, "not-ready");
  CHECK(json::parse(section->body).at("stage") == "topicmodel");

  expect_problem(c.Get("/analyses/job-999999"), 404, "not-found");
  expect_problem(c.Post("/analyses", "{", "application/json"), 400, "invalid-input");
  expect_problem(c.Post("/analyses", R"({"corpus_id":"news","shape":"round"})", "application/json"),
                 400, "configuration");
  expect_problem(c.Post("/analyses", R"({"corpus_id":"missing"})", "application/json"), 404,
                 "not-found");
}

TEST_CASE("job registry states") {
  testing::TempDir tmp;
  corpus::CorpusStore store(tmp.path());
  store.ingest_documents(testing::synthetic_articles(20, 1), "news");
  pipeline::BundleStore bundles(tmp.path());
  JobRegistry jobs(store, bundles, 1);
  pipeline::PipelineConfig config;
  config.corpus_id = "news";
  config.lda.topics = 2;
  config.lda.iterations = 50;
  config.lda.burn_in = 10;
  const auto a = jobs.submit(config);
  const auto b = jobs.submit(config);
  CHECK(a == "job-000001");
  CHECK(b == "job-000002");
  const auto first = jobs.wait(a);
  CHECK(first.state == JobState::kDone);
  CHECK(jobs.wait(b).bundle_key == first.bundle_key);
  CHECK(to_json(first).at("state") == "done");
  CHECK_THROWS_AS(jobs.job_status("job-000003"), Error);
}

TEST_CASE("startup failures") {
  testing::TempDir tmp;
  std::ofstream(tmp.path() / "plain-file") << "x";
  CHECK_THROWS_AS(Service(ServiceOptions{tmp.path() / "plain-file", 1}), Error);

  Running first(tmp.path() / "a");
  Service second(ServiceOptions{tmp.path() / "b", 1});
  try {
    second.bind("127.0.0.1", first.port());
    FAIL("expected the second bind to fail");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}
