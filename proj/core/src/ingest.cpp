#include "apisum/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "apisum/errors.hpp"
#include "apisum/html.hpp"

namespace apisum::ingest {

using nlohmann::json;

const char* to_string(PostType type) {
  return type == PostType::question ? "question" : "answer";
}

void check_invariants(const RawPost& post, std::size_t record_index) {
  if (post.id <= 0) throw MalformedRecord(record_index, "id must be positive");
  if (post.is_answer()) {
    if (!post.parent_id) throw MalformedRecord(record_index, "answer without parent id");
    if (post.title) throw MalformedRecord(record_index, "answer with a title");
    if (!post.tags.empty()) throw MalformedRecord(record_index, "answer with tags");
  } else if (post.parent_id) {
    throw MalformedRecord(record_index, "question with a parent id");
  }
  if (post.parent_id && *post.parent_id <= 0) {
    throw MalformedRecord(record_index, "parent id must be positive");
  }
}

Dataset::Dataset(std::vector<RawPost> posts) : posts_(std::move(posts)) {
  by_id_.reserve(posts_.size());
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    if (!by_id_.emplace(posts_[i].id, i).second) {
      throw Error("duplicate post id " + std::to_string(posts_[i].id));
    }
  }
}

const RawPost* Dataset::find(std::int64_t id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &posts_[it->second];
}

std::size_t Dataset::question_count() const {
  return static_cast<std::size_t>(
      std::count_if(posts_.begin(), posts_.end(), [](const RawPost& p) { return p.is_question(); }));
}

std::size_t Dataset::answer_count() const { return posts_.size() - question_count(); }

namespace {

std::optional<std::int64_t> to_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// "<android><java>" (classic dumps) or "|android|java|" (newer dumps).
std::vector<std::string> split_tags(std::string_view text) {
  std::vector<std::string> tags;
  std::string current;
  for (char c : text) {
    if (c == '<' || c == '>' || c == '|') {
      if (!current.empty()) tags.push_back(to_lower(std::move(current)));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tags.push_back(to_lower(std::move(current)));
  return tags;
}

std::int64_t required_int(const std::unordered_map<std::string, std::string>& attrs,
                          const char* name, std::size_t record_index) {
  const auto it = attrs.find(name);
  if (it == attrs.end()) throw MalformedRecord(record_index, std::string("missing ") + name);
  const auto value = to_int(it->second);
  if (!value) throw MalformedRecord(record_index, std::string("bad integer in ") + name);
  return *value;
}

}  // namespace

std::optional<RawPost> parse_xml_row(std::string_view row, std::size_t record_index) {
  const std::size_t start = row.find("<row");
  if (start == std::string_view::npos) throw MalformedRecord(record_index, "not a row element");
  std::unordered_map<std::string, std::string> attrs;
  std::size_t i = start + 4;
  while (i < row.size()) {
    while (i < row.size() && std::isspace(static_cast<unsigned char>(row[i]))) ++i;
    if (i >= row.size() || row[i] == '/' || row[i] == '>') break;
    const std::size_t name_start = i;
    while (i < row.size() && row[i] != '=' && !std::isspace(static_cast<unsigned char>(row[i]))) {
      ++i;
    }
    const std::string name(row.substr(name_start, i - name_start));
    while (i < row.size() && std::isspace(static_cast<unsigned char>(row[i]))) ++i;
    if (i >= row.size() || row[i] != '=') {
      throw MalformedRecord(record_index, "attribute without value: " + name);
    }
    ++i;
    while (i < row.size() && std::isspace(static_cast<unsigned char>(row[i]))) ++i;
    if (i >= row.size() || (row[i] != '"' && row[i] != '\'')) {
      throw MalformedRecord(record_index, "unquoted attribute: " + name);
    }
    const char quote = row[i++];
    const std::size_t end = row.find(quote, i);
    if (end == std::string_view::npos) {
      throw MalformedRecord(record_index, "unterminated attribute: " + name);
    }
    attrs.emplace(name, html::decode_entities(row.substr(i, end - i)));
    i = end + 1;
  }

  const std::int64_t type_id = required_int(attrs, "PostTypeId", record_index);
  if (type_id != 1 && type_id != 2) return std::nullopt;

  RawPost post;
  post.post_type = type_id == 1 ? PostType::question : PostType::answer;
  post.id = required_int(attrs, "Id", record_index);
  post.score = required_int(attrs, "Score", record_index);
  if (attrs.count("ParentId")) post.parent_id = required_int(attrs, "ParentId", record_index);
  if (auto it = attrs.find("Title"); it != attrs.end()) post.title = it->second;
  if (auto it = attrs.find("Tags"); it != attrs.end()) post.tags = split_tags(it->second);
  const auto body = attrs.find("Body");
  if (body == attrs.end()) throw MalformedRecord(record_index, "missing Body");
  post.body_html = body->second;
  const auto date = attrs.find("CreationDate");
  if (date == attrs.end()) throw MalformedRecord(record_index, "missing CreationDate");
  if (!try_parse_timestamp(date->second, post.creation_date)) {
    throw MalformedRecord(record_index, "bad CreationDate '" + date->second + "'");
  }
  check_invariants(post, record_index);
  return post;
}

std::optional<RawPost> parse_json_record(std::string_view line, std::size_t record_index) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(record_index, e.what());
  }
  if (!j.is_object()) throw MalformedRecord(record_index, "record is not an object");
  try {
    const auto type = j.at("post_type").get<std::string>();
    if (type != "question" && type != "answer") return std::nullopt;
    RawPost post;
    post.post_type = type == "question" ? PostType::question : PostType::answer;
    post.id = j.at("id").get<std::int64_t>();
    post.score = j.at("score").get<std::int64_t>();
    if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
      post.parent_id = it->get<std::int64_t>();
    }
    if (auto it = j.find("title"); it != j.end() && !it->is_null()) {
      post.title = it->get<std::string>();
    }
    post.body_html = j.at("body_html").get<std::string>();
    if (auto it = j.find("tags"); it != j.end() && !it->is_null()) {
      for (const auto& tag : *it) post.tags.push_back(to_lower(tag.get<std::string>()));
    }
    const auto date = j.at("creation_date").get<std::string>();
    if (!try_parse_timestamp(date, post.creation_date)) {
      throw MalformedRecord(record_index, "bad creation_date '" + date + "'");
    }
    check_invariants(post, record_index);
    return post;
  } catch (const json::exception& e) {
    throw MalformedRecord(record_index, e.what());
  }
}

std::string to_json_record(const RawPost& post) {
  // Fixed key order keeps store files diffable.
  json j = json::object();
  j["id"] = post.id;
  j["post_type"] = to_string(post.post_type);
  j["parent_id"] = post.parent_id ? json(*post.parent_id) : json(nullptr);
  j["score"] = post.score;
  j["title"] = post.title ? json(*post.title) : json(nullptr);
  j["body_html"] = post.body_html;
  j["tags"] = post.tags;
  j["creation_date"] = format_timestamp(post.creation_date);
  return j.dump();
}

PostReader::PostReader(std::istream& in, DumpFormat format, ParseOptions options)
    : in_(in), format_(format), options_(options) {}

PostReader::~PostReader() = default;

std::optional<RawPost> PostReader::next() {
  return format_ == DumpFormat::xml_rows ? next_xml() : next_jsonl();
}

std::optional<RawPost> PostReader::next_xml() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    const std::size_t start = line.find("<row");
    if (start == std::string::npos) continue;
    const std::size_t record_index = line_no_;
    std::string row = line.substr(start);
    std::string more;
    while (row.find("/>") == std::string::npos && std::getline(in_, more)) {
      ++line_no_;
      row += '\n';
      row += more;
    }
    try {
      if (auto post = parse_xml_row(row, record_index)) return post;
    } catch (const MalformedRecord&) {
      if (!options_.lenient) throw;
      ++skipped_;
    }
  }
  return std::nullopt;
}

std::optional<RawPost> PostReader::next_jsonl() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      if (auto post = parse_json_record(line, line_no_)) return post;
    } catch (const MalformedRecord&) {
      if (!options_.lenient) throw;
      ++skipped_;
    }
  }
  return std::nullopt;
}

std::vector<RawPost> parse_dump(std::istream& in, DumpFormat format, ParseOptions options) {
  PostReader reader(in, format, options);
  std::vector<RawPost> posts;
  while (auto post = reader.next()) posts.push_back(std::move(*post));
  return posts;
}

void IngestConfig::validate() const {
  if (tag.empty()) throw Error("tag must be nonempty");
  if (std::any_of(tag.begin(), tag.end(),
                  [](unsigned char c) { return std::isupper(c) != 0; })) {
    throw Error("tag must be lowercase");
  }
  if (date_from > date_to) throw Error("date_from must not be after date_to");
}

Dataset filter_dataset(const std::vector<RawPost>& posts, const IngestConfig& cfg) {
  std::unordered_set<std::int64_t> kept_questions;
  for (const auto& post : posts) {
    if (!post.is_question()) continue;
    if (post.creation_date < cfg.date_from || post.creation_date > cfg.date_to) continue;
    if (std::find(post.tags.begin(), post.tags.end(), cfg.tag) == post.tags.end()) continue;
    kept_questions.insert(post.id);
  }
  std::vector<RawPost> kept;
  for (const auto& post : posts) {
    const bool keep = post.is_question() ? kept_questions.count(post.id) > 0
                                         : kept_questions.count(*post.parent_id) > 0;
    if (keep) kept.push_back(post);
  }
  return Dataset(std::move(kept));
}

Dataset filter_dataset(const Dataset& dataset, const IngestConfig& cfg) {
  return filter_dataset(dataset.posts(), cfg);
}

void store_save(const Dataset& dataset, const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << kStoreHeader << '\n';
    for (const auto& post : dataset.posts()) out << to_json_record(post) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move store into place at '" + path.string() + "': " + ec.message());
}

Dataset store_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open store '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) throw IoError("store '" + path.string() + "' is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kStoreHeader) {
    throw SchemaVersionMismatch("store '" + path.string() + "' has header '" + header +
                                "', expected '" + std::string(kStoreHeader) + "'");
  }
  std::vector<RawPost> posts;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto post = parse_json_record(line, line_no);
    if (!post) throw MalformedRecord(line_no, "unknown post type in store");
    posts.push_back(std::move(*post));
  }
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return Dataset(std::move(posts));
}

}  // namespace apisum::ingest
