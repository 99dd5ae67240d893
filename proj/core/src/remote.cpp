// Stack Exchange REST client used by the remote ingest source.

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "apisum/errors.hpp"
#include "apisum/html.hpp"
#include "apisum/ingest.hpp"

namespace apisum::ingest {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // e.g. "/2.3", never ends with '/'
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  return ep;
}

class StackExchangeClient {
 public:
  StackExchangeClient(const std::string& endpoint, const RemoteOptions& options)
      : endpoint_(split_endpoint(endpoint)), options_(options), client_(endpoint_.origin) {
    client_.set_connection_timeout(options_.timeout);
    client_.set_read_timeout(options_.timeout);
    client_.set_decompress(true);
    client_.set_default_headers({{"Accept-Encoding", "gzip"}});
    client_.set_follow_location(true);
  }

  // GET base_path + route with the shared query parameters. Honors backoff
  // and quota directives from earlier responses.
  json get(const std::string& route, httplib::Params params) {
    if (quota_exhausted_) throw QuotaExhausted("Stack Exchange quota exhausted");
    params.emplace("site", options_.site);
    if (options_.api_key) params.emplace("key", *options_.api_key);
    const std::string path =
        httplib::append_query_params(endpoint_.base_path + route, params);

    int last_status = 0;
    std::string last_detail;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(options_.retry_base_delay * (1 << (attempt - 1)));
      wait_for_backoff();
      auto res = client_.Get(path);
      if (!res) {
        last_status = 0;
        last_detail = httplib::to_string(res.error());
        continue;
      }
      last_status = res->status;
      if (res->status == 200) return decode(res->body);
      last_detail = res->body.substr(0, 200);
      // Client errors other than throttling will not improve on retry.
      if (res->status >= 400 && res->status < 500 && res->status != 429) break;
    }
    throw HttpError(last_status, last_detail);
  }

 private:
  json decode(const std::string& body) {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::parse_error& e) {
      throw Error(std::string("unparseable Stack Exchange response: ") + e.what());
    }
    if (auto it = j.find("backoff"); it != j.end() && it->is_number()) {
      next_request_ = Clock::now() + std::chrono::seconds(it->get<long long>());
    }
    if (auto it = j.find("quota_remaining"); it != j.end() && it->is_number()) {
      quota_exhausted_ = it->get<long long>() <= 0;
    }
    return j;
  }

  void wait_for_backoff() {
    if (next_request_) {
      std::this_thread::sleep_until(*next_request_);
      next_request_.reset();
    }
  }

  Endpoint endpoint_;
  RemoteOptions options_;
  httplib::Client client_;
  std::optional<Clock::time_point> next_request_;
  bool quota_exhausted_ = false;
};

RawPost question_from_item(const json& item) {
  RawPost post;
  post.post_type = PostType::question;
  post.id = item.at("question_id").get<std::int64_t>();
  post.score = item.value("score", std::int64_t{0});
  post.title = html::decode_entities(item.value("title", std::string()));
  post.body_html = item.value("body", std::string());
  for (const auto& tag : item.value("tags", json::array())) {
    auto name = tag.get<std::string>();
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    post.tags.push_back(std::move(name));
  }
  post.creation_date = from_unix_seconds(item.at("creation_date").get<long long>());
  return post;
}

RawPost answer_from_item(const json& item) {
  RawPost post;
  post.post_type = PostType::answer;
  post.id = item.at("answer_id").get<std::int64_t>();
  post.parent_id = item.at("question_id").get<std::int64_t>();
  post.score = item.value("score", std::int64_t{0});
  post.body_html = item.value("body", std::string());
  post.creation_date = from_unix_seconds(item.at("creation_date").get<long long>());
  return post;
}

}  // namespace

void fetch_remote(const IngestConfig& cfg, const std::string& endpoint,
                  const std::function<void(RawPost&&)>& sink, const RemoteOptions& options) {
  cfg.validate();
  StackExchangeClient client(endpoint, options);
  const std::string page_size = std::to_string(options.page_size);
  std::size_t record_index = 0;

  for (int page = 1;; ++page) {
    const json listing = client.get("/questions", {{"tagged", cfg.tag},
                                                   {"fromdate", std::to_string(to_unix_seconds(cfg.date_from))},
                                                   {"todate", std::to_string(to_unix_seconds(cfg.date_to))},
                                                   {"filter", "withbody"},
                                                   {"order", "asc"},
                                                   {"sort", "creation"},
                                                   {"page", std::to_string(page)},
                                                   {"pagesize", page_size}});
    std::string ids;
    for (const auto& item : listing.value("items", json::array())) {
      RawPost post;
      try {
        post = question_from_item(item);
      } catch (const json::exception& e) {
        throw MalformedRecord(record_index, e.what());
      }
      check_invariants(post, record_index++);
      if (!ids.empty()) ids += ';';
      ids += std::to_string(post.id);
      sink(std::move(post));
    }

    if (!ids.empty()) {
      for (int answer_page = 1;; ++answer_page) {
        const json answers = client.get("/questions/" + ids + "/answers",
                                        {{"filter", "withbody"},
                                         {"order", "asc"},
                                         {"sort", "creation"},
                                         {"page", std::to_string(answer_page)},
                                         {"pagesize", page_size}});
        for (const auto& item : answers.value("items", json::array())) {
          RawPost post;
          try {
            post = answer_from_item(item);
          } catch (const json::exception& e) {
            throw MalformedRecord(record_index, e.what());
          }
          check_invariants(post, record_index++);
          sink(std::move(post));
        }
        if (!answers.value("has_more", false)) break;
      }
    }

    if (!listing.value("has_more", false)) break;
  }
}

std::vector<RawPost> fetch_remote(const IngestConfig& cfg, const std::string& endpoint,
                                  const RemoteOptions& options) {
  std::vector<RawPost> posts;
  fetch_remote(cfg, endpoint, [&](RawPost&& post) { posts.push_back(std::move(post)); }, options);
  return posts;
}

}  // namespace apisum::ingest
