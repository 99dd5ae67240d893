// Runs fetch_remote against an in-process mock of the Stack Exchange API.

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "apisum/errors.hpp"
#include "apisum/ingest.hpp"

namespace apisum::ingest {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct LoggedRequest {
  std::string path;
  httplib::Params params;
  std::string accept_encoding;
  Clock::time_point at;
};

class MockStackExchange {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  MockStackExchange(Handler questions, Handler answers) {
    server_.Get("/2.3/questions", [this, questions](const httplib::Request& req, httplib::Response& res) {
      questions(req, res, log(req, question_calls_));
    });
    server_.Get(R"(/2.3/questions/([0-9;]+)/answers)",
                [this, answers](const httplib::Request& req, httplib::Response& res) {
                  answers(req, res, log(req, answer_calls_));
                });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockStackExchange() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/2.3"; }

  std::vector<LoggedRequest> requests() {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  int log(const httplib::Request& req, std::atomic<int>& counter) {
    std::lock_guard lock(mu_);
    log_.push_back({req.path, req.params, req.get_header_value("Accept-Encoding"), Clock::now()});
    return counter++;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::vector<LoggedRequest> log_;
  std::atomic<int> question_calls_{0};
  std::atomic<int> answer_calls_{0};
};

json question_item(std::int64_t id) {
  return {{"question_id", id},
          {"score", 4},
          {"title", "Why &quot;onCreate&quot; twice?"},
          {"body", "<p>body</p>"},
          {"tags", {"Android"}},
          {"creation_date", 1420070400}};
}

void send(httplib::Response& res, const json& j) { res.set_content(j.dump(), "application/json"); }

void no_answers(const httplib::Request&, httplib::Response& res, int) {
  send(res, {{"items", json::array()}, {"has_more", false}});
}

RemoteOptions fast_options() {
  RemoteOptions o;
  o.retry_base_delay = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

TEST(FetchRemote, PagesThroughQuestions) {
  MockStackExchange mock(
      [](const httplib::Request& req, httplib::Response& res, int) {
        const int page = std::stoi(req.get_param_value("page"));
        send(res, {{"items", {question_item(page)}}, {"has_more", page < 2}, {"quota_remaining", 100}});
      },
      no_answers);
  const auto posts = fetch_remote(IngestConfig{}, mock.endpoint(), fast_options());
  ASSERT_EQ(posts.size(), 2u);
  EXPECT_EQ(posts[0].id, 1);
  EXPECT_EQ(posts[1].id, 2);
  EXPECT_EQ(posts[0].title, "Why \"onCreate\" twice?");
  EXPECT_EQ(posts[0].tags, std::vector<std::string>{"android"});
  EXPECT_EQ(format_timestamp(posts[0].creation_date), "2015-01-01T00:00:00.000");

  const auto log = mock.requests();
  ASSERT_FALSE(log.empty());
  const auto& first = log.front();
  auto param = [&](const char* key) {
    auto it = first.params.find(key);
    return it == first.params.end() ? std::string() : it->second;
  };
  EXPECT_EQ(param("tagged"), "android");
  EXPECT_EQ(param("filter"), "withbody");
  EXPECT_EQ(param("site"), "stackoverflow");
  EXPECT_EQ(param("fromdate"), "1230768000");
  EXPECT_EQ(param("todate"), "1588291199");
  EXPECT_NE(first.accept_encoding.find("gzip"), std::string::npos);
}

TEST(FetchRemote, AnswersAreLinkedToTheirQuestions) {
  MockStackExchange mock(
      [](const httplib::Request&, httplib::Response& res, int) {
        send(res, {{"items", {question_item(7), question_item(8)}}, {"has_more", false}});
      },
      [](const httplib::Request& req, httplib::Response& res, int) {
        EXPECT_EQ(req.matches[1], "7;8");
        send(res, {{"items",
                    {{{"answer_id", 70}, {"question_id", 7}, {"score", 3}, {"body", "<p>a</p>"},
                      {"creation_date", 1420070500}}}},
                   {"has_more", false}});
      });
  const auto posts = fetch_remote(IngestConfig{}, mock.endpoint(), fast_options());
  ASSERT_EQ(posts.size(), 3u);
  EXPECT_TRUE(posts[2].is_answer());
  EXPECT_EQ(posts[2].parent_id, 7);
  EXPECT_EQ(posts[2].score, 3);
}

TEST(FetchRemote, HonorsBackoff) {
  MockStackExchange mock(
      [](const httplib::Request& req, httplib::Response& res, int) {
        const int page = std::stoi(req.get_param_value("page"));
        json j{{"items", json::array()}, {"has_more", page < 2}};
        if (page == 1) j["backoff"] = 2;
        send(res, j);
      },
      no_answers);
  fetch_remote(IngestConfig{}, mock.endpoint(), fast_options());
  const auto log = mock.requests();
  ASSERT_EQ(log.size(), 2u);
  EXPECT_GE(log[1].at - log[0].at, std::chrono::seconds(2));
}

TEST(FetchRemote, ServerErrorAfterRetries) {
  MockStackExchange mock([](const httplib::Request&, httplib::Response& res, int) { res.status = 500; },
                         no_answers);
  try {
    fetch_remote(IngestConfig{}, mock.endpoint(), fast_options());
    FAIL() << "expected HttpError";
  } catch (const HttpError& e) {
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(mock.requests().size(), 4u);  // first attempt + 3 retries
}

TEST(FetchRemote, ClientErrorIsNotRetried) {
  MockStackExchange mock([](const httplib::Request&, httplib::Response& res, int) { res.status = 400; },
                         no_answers);
  EXPECT_THROW(fetch_remote(IngestConfig{}, mock.endpoint(), fast_options()), HttpError);
  EXPECT_EQ(mock.requests().size(), 1u);
}

TEST(FetchRemote, TransientErrorRecovers) {
  MockStackExchange mock(
      [](const httplib::Request&, httplib::Response& res, int call) {
        if (call == 0) {
          res.status = 503;
          return;
        }
        send(res, {{"items", {question_item(1)}}, {"has_more", false}});
      },
      no_answers);
  EXPECT_EQ(fetch_remote(IngestConfig{}, mock.endpoint(), fast_options()).size(), 1u);
}

TEST(FetchRemote, QuotaExhaustedStopsFurtherRequests) {
  MockStackExchange mock(
      [](const httplib::Request&, httplib::Response& res, int) {
        send(res, {{"items", json::array()}, {"has_more", true}, {"quota_remaining", 0}});
      },
      no_answers);
  EXPECT_THROW(fetch_remote(IngestConfig{}, mock.endpoint(), fast_options()), QuotaExhausted);
  EXPECT_EQ(mock.requests().size(), 1u);
}

TEST(FetchRemote, UnreachableServerIsStatusZero) {
  auto options = fast_options();
  options.max_retries = 0;
  options.timeout = std::chrono::seconds(1);
  try {
    // Port 1 on loopback is essentially never listening.
    fetch_remote(IngestConfig{}, "http://127.0.0.1:1/2.3", options);
    FAIL() << "expected HttpError";
  } catch (const HttpError& e) {
    EXPECT_EQ(e.status(), 0);
  }
}

}  // namespace
}  // namespace apisum::ingest
