#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "apisum/timestamp.hpp"

namespace apisum::ingest {

enum class PostType { question, answer };

const char* to_string(PostType type);

// One Stack Overflow post. Answers carry a parent_id and never a title or
// tags; questions never carry a parent_id.
struct RawPost {
  std::int64_t id = 0;
  PostType post_type = PostType::question;
  std::optional<std::int64_t> parent_id;
  std::int64_t score = 0;
  std::optional<std::string> title;
  std::string body_html;
  std::vector<std::string> tags;
  Timestamp creation_date{};

  bool is_question() const { return post_type == PostType::question; }
  bool is_answer() const { return post_type == PostType::answer; }

  friend bool operator==(const RawPost&, const RawPost&) = default;
};

// Throws MalformedRecord(record_index, ...) if the type/linkage invariants do
// not hold.
void check_invariants(const RawPost& post, std::size_t record_index);

// Posts in input order plus an id index.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<RawPost> posts);

  const std::vector<RawPost>& posts() const { return posts_; }
  std::size_t size() const { return posts_.size(); }
  bool empty() const { return posts_.empty(); }

  const RawPost* find(std::int64_t id) const;
  std::size_t question_count() const;
  std::size_t answer_count() const;

  friend bool operator==(const Dataset& a, const Dataset& b) { return a.posts_ == b.posts_; }

 private:
  std::vector<RawPost> posts_;
  std::unordered_map<std::int64_t, std::size_t> by_id_;
};

enum class DumpFormat { xml_rows, jsonl };

struct ParseOptions {
  // Strict mode aborts on the first malformed row; lenient mode skips it.
  bool lenient = false;
};

// Streaming reader over a Posts.xml-style dump or a JSONL export. Rows whose
// PostTypeId is neither 1 nor 2 are skipped silently.
class PostReader {
 public:
  PostReader(std::istream& in, DumpFormat format, ParseOptions options = {});
  ~PostReader();
  PostReader(const PostReader&) = delete;
  PostReader& operator=(const PostReader&) = delete;

  std::optional<RawPost> next();

  // Rows dropped in lenient mode.
  std::size_t skipped_malformed() const { return skipped_; }

 private:
  std::optional<RawPost> next_xml();
  std::optional<RawPost> next_jsonl();

  std::istream& in_;
  DumpFormat format_;
  ParseOptions options_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
};

std::vector<RawPost> parse_dump(std::istream& in, DumpFormat format, ParseOptions options = {});

// Parses one `<row .../>` element. Returns nullopt for post types other than
// question/answer. Throws MalformedRecord.
std::optional<RawPost> parse_xml_row(std::string_view row, std::size_t record_index);

// One JSONL object. Throws MalformedRecord.
std::optional<RawPost> parse_json_record(std::string_view line, std::size_t record_index);
std::string to_json_record(const RawPost& post);

enum class SourceKind { dump_file, jsonl_file, remote };

struct IngestConfig {
  std::string tag = "android";
  Timestamp date_from = parse_timestamp("2009-01-01");
  Timestamp date_to = end_of_day(parse_timestamp("2020-04-30"));
  SourceKind source = SourceKind::dump_file;

  // Throws apisum::Error when the invariants are violated.
  void validate() const;
};

// Keeps in-window questions carrying cfg.tag and every answer whose parent
// question was kept. Input order is preserved.
Dataset filter_dataset(const std::vector<RawPost>& posts, const IngestConfig& cfg);
Dataset filter_dataset(const Dataset& dataset, const IngestConfig& cfg);

struct RemoteOptions {
  std::string site = "stackoverflow";
  int page_size = 100;
  int max_retries = 3;
  std::chrono::milliseconds retry_base_delay{1000};
  std::chrono::seconds timeout{30};
  std::optional<std::string> api_key;
};

// Pages through the Stack Exchange `questions` route filtered by tag and date
// window, then `questions/{ids}/answers` for each page of questions. Each post
// is handed to `sink` as soon as it is decoded. Throws HttpError after the
// retry budget is spent and QuotaExhausted when the server reports a zero
// remaining quota while more requests are still needed.
void fetch_remote(const IngestConfig& cfg, const std::string& endpoint,
                  const std::function<void(RawPost&&)>& sink, const RemoteOptions& options = {});

std::vector<RawPost> fetch_remote(const IngestConfig& cfg, const std::string& endpoint,
                                  const RemoteOptions& options = {});

// Newline-delimited store: one header line followed by one JSON post per line.
inline constexpr std::string_view kStoreHeader = "apisum-store v1";

void store_save(const Dataset& dataset, const std::filesystem::path& path);
Dataset store_load(const std::filesystem::path& path);

}  // namespace apisum::ingest
