#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apisum/ingest.hpp"

namespace apisum::apix {

enum class SnippetKind { inline_span, block };

struct CodeEntity {
  std::string raw_text;
  std::int64_t source_post_id = 0;
  SnippetKind kind = SnippetKind::inline_span;
};

enum class Classification { method, file, rejected };

const char* to_string(Classification c);

struct EntityFilterConfig {
  std::set<std::string> denylist;
  // simple name "onCreate()" -> qualified name "app.Activity.onCreate()"
  std::map<std::string, std::string> qualifiers;
  std::size_t inline_length_cap = 120;
  std::size_t top_k = 15;
  bool assume_method_without_parens = false;
  // Also scan <pre> blocks for call expressions when counting mentions.
  bool count_blocks = false;

  void validate() const;
};

struct ApiMethodStats {
  std::string name;
  std::uint64_t question_mentions = 0;
  std::uint64_t answer_mentions = 0;
  std::uint64_t total = 0;

  friend bool operator==(const ApiMethodStats&, const ApiMethodStats&) = default;
};

std::vector<CodeEntity> extract_code_entities(std::string_view body_html, std::int64_t post_id = 0,
                                              std::size_t inline_length_cap = 120);

// Strips the trailing argument list and surrounding whitespace. Bare names
// gain "()" only when `assume_method_without_parens` is set.
// Throws UnbalancedParens.
std::string normalize_entity(std::string_view raw_text, bool assume_method_without_parens = false);

Classification validate_entity(const CodeEntity& e, const EntityFilterConfig& cfg);

// True if `text` matches the file pattern ^(/?\w*)*\.\w+$ (for example
// "studio.sh" or "/opt/bin/run.sh").
bool looks_like_file(std::string_view text);

// "onCreate()" for "app.Activity.onCreate()".
std::string simple_name(std::string_view canonical);

// Applies the qualifier map; see EntityFilterConfig::qualifiers.
std::string qualify(const std::string& canonical, const EntityFilterConfig& cfg);

bool is_denied(const std::string& canonical, const EntityFilterConfig& cfg);

// Method mentions of one post body, canonical and qualified, one entry per
// occurrence.
std::vector<std::string> method_mentions(std::string_view body_html, const EntityFilterConfig& cfg);

// Counts are sorted by name.
std::vector<ApiMethodStats> count_mentions(const ingest::Dataset& dataset,
                                           const EntityFilterConfig& cfg);

std::vector<ApiMethodStats> rank_top_k(std::vector<ApiMethodStats> stats,
                                       const EntityFilterConfig& cfg);

// Newline-delimited name list; blank lines and '#' comments ignored.
std::set<std::string> parse_denylist(std::string_view text);
std::set<std::string> load_denylist(const std::filesystem::path& path);

// Lines "simpleName()<TAB>qualified.Name()".
std::map<std::string, std::string> parse_qualifier_map(std::string_view text);
std::map<std::string, std::string> load_qualifier_map(const std::filesystem::path& path);

// Shipped defaults.
std::set<std::string> default_denylist();
std::map<std::string, std::string> default_qualifier_map();

std::string stats_to_json(const std::vector<ApiMethodStats>& stats);
std::vector<ApiMethodStats> stats_from_json(std::string_view text);

}  // namespace apisum::apix
