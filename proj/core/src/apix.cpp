#include "apisum/apix.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "apisum/errors.hpp"
#include "apisum/html.hpp"
#include "embedded_data.hpp"

namespace apisum::apix {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool in_entity_charset(char c) {
  return is_word_char(c) || c == '.' || c == '(' || c == ')';
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

// ^[A-Za-z0-9_]+(\.[A-Za-z0-9_]+)*\(\)$ with at least one letter.
bool is_method_name(std::string_view name) {
  if (name.size() < 3 || name.substr(name.size() - 2) != "()") return false;
  const std::string_view dotted = name.substr(0, name.size() - 2);
  bool has_letter = false;
  bool segment_empty = true;
  for (char c : dotted) {
    if (c == '.') {
      if (segment_empty) return false;
      segment_empty = true;
    } else if (is_word_char(c)) {
      segment_empty = false;
      has_letter |= std::isalpha(static_cast<unsigned char>(c)) != 0;
    } else {
      return false;
    }
  }
  return !segment_empty && has_letter;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::regex& call_expression() {
  static const std::regex re(R"(([A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*)\s*\()");
  return re;
}

bool is_java_keyword(std::string_view name) {
  static const std::set<std::string, std::less<>> kKeywords{
      "if", "for", "while", "switch", "catch", "return", "synchronized", "super", "this", "new",
      "try", "do", "else", "throw", "assert"};
  return kKeywords.count(name) > 0;
}

void collect_block_calls(const std::string& code, const EntityFilterConfig& cfg,
                         std::vector<std::string>& out) {
  for (auto it = std::sregex_iterator(code.begin(), code.end(), call_expression());
       it != std::sregex_iterator(); ++it) {
    const std::string name = (*it)[1].str();
    if (is_java_keyword(name)) continue;
    // "new Foo(...)" is a constructor call.
    const auto pos = static_cast<std::size_t>(it->position(1));
    if (pos >= 4 && code.compare(pos - 4, 4, "new ") == 0) continue;
    const CodeEntity candidate{name + "()", 0, SnippetKind::inline_span};
    if (validate_entity(candidate, cfg) == Classification::method) {
      out.push_back(qualify(normalize_entity(candidate.raw_text), cfg));
    }
  }
}

}  // namespace

const char* to_string(Classification c) {
  switch (c) {
    case Classification::method: return "method";
    case Classification::file: return "file";
    case Classification::rejected: return "rejected";
  }
  return "rejected";
}

void EntityFilterConfig::validate() const {
  if (top_k < 1) throw Error("top_k must be at least 1");
  if (inline_length_cap < 1) throw Error("inline_length_cap must be positive");
}

std::vector<CodeEntity> extract_code_entities(std::string_view body_html, std::int64_t post_id,
                                              std::size_t inline_length_cap) {
  std::vector<CodeEntity> entities;
  for (auto& span : html::code_spans(body_html)) {
    const bool block = span.in_pre || span.text.find('\n') != std::string::npos ||
                       utf8_length(span.text) > inline_length_cap;
    entities.push_back({std::move(span.text), post_id,
                        block ? SnippetKind::block : SnippetKind::inline_span});
  }
  return entities;
}

std::string normalize_entity(std::string_view raw_text, bool assume_method_without_parens) {
  const std::string_view text = trim(raw_text);
  const auto opens = std::count(text.begin(), text.end(), '(');
  const auto closes = std::count(text.begin(), text.end(), ')');
  if (opens != closes) throw UnbalancedParens("unbalanced parentheses in '" + std::string(text) + "'");
  if (opens == 0) {
    return assume_method_without_parens ? std::string(text) + "()" : std::string(text);
  }

  // Locate the argument list: the group closed by the last ')' when the text
  // ends with one, otherwise the last '(' and its partner.
  std::size_t open = std::string_view::npos;
  std::size_t close = std::string_view::npos;
  if (text.back() == ')') {
    close = text.size() - 1;
    int depth = 0;
    for (std::size_t i = close + 1; i-- > 0;) {
      if (text[i] == ')') ++depth;
      else if (text[i] == '(' && --depth == 0) {
        open = i;
        break;
      }
    }
  } else {
    open = text.rfind('(');
    int depth = 0;
    for (std::size_t i = open; i < text.size(); ++i) {
      if (text[i] == '(') ++depth;
      else if (text[i] == ')' && --depth == 0) {
        close = i;
        break;
      }
    }
  }
  if (open == std::string_view::npos || close == std::string_view::npos) {
    throw UnbalancedParens("unbalanced parentheses in '" + std::string(text) + "'");
  }
  std::string head(trim(text.substr(0, open)));
  std::string result = head + "()" + std::string(text.substr(close + 1));
  if (result.size() < 2 || result.compare(result.size() - 2, 2, "()") != 0) result += "()";
  return result;
}

bool looks_like_file(std::string_view text) {
  // (/?\w*)* accepts exactly the strings over [\w/], so the pattern reduces
  // to [\w/]* '.' \w+ anchored at both ends.
  const auto dot = text.rfind('.');
  if (dot == std::string_view::npos || dot + 1 == text.size()) return false;
  for (std::size_t i = 0; i < dot; ++i) {
    if (!is_word_char(text[i]) && text[i] != '/') return false;
  }
  for (std::size_t i = dot + 1; i < text.size(); ++i) {
    if (!is_word_char(text[i])) return false;
  }
  return true;
}

std::string simple_name(std::string_view canonical) {
  const std::string_view base =
      canonical.size() >= 2 && canonical.substr(canonical.size() - 2) == "()"
          ? canonical.substr(0, canonical.size() - 2)
          : canonical;
  const auto dot = base.rfind('.');
  const std::string_view last = dot == std::string_view::npos ? base : base.substr(dot + 1);
  return std::string(last) + "()";
}

std::string qualify(const std::string& canonical, const EntityFilterConfig& cfg) {
  if (!is_method_name(canonical)) return canonical;
  const auto it = cfg.qualifiers.find(simple_name(canonical));
  if (it == cfg.qualifiers.end()) return canonical;
  const std::string& target = it->second;
  if (canonical == it->first || canonical == target) return target;
  // A partially qualified form such as "Activity.onCreate()" merges when it
  // is a dotted suffix of the mapped name.
  if (target.size() > canonical.size() &&
      target.compare(target.size() - canonical.size(), canonical.size(), canonical) == 0 &&
      target[target.size() - canonical.size() - 1] == '.') {
    return target;
  }
  return canonical;
}

bool is_denied(const std::string& canonical, const EntityFilterConfig& cfg) {
  if (cfg.denylist.count(canonical)) return true;
  if (canonical.size() > 2 && canonical.compare(canonical.size() - 2, 2, "()") == 0 &&
      cfg.denylist.count(canonical.substr(0, canonical.size() - 2))) {
    return true;
  }
  const std::string qualified = qualify(canonical, cfg);
  return qualified != canonical && cfg.denylist.count(qualified) > 0;
}

Classification validate_entity(const CodeEntity& e, const EntityFilterConfig& cfg) {
  if (e.kind == SnippetKind::block) return Classification::rejected;
  const std::string_view text = trim(e.raw_text);
  if (text.empty()) return Classification::rejected;

  const bool has_parens = text.find_first_of("()") != std::string_view::npos;
  std::string outer;
  if (has_parens) {
    try {
      outer = normalize_entity(text);
    } catch (const UnbalancedParens&) {
      return Classification::rejected;
    }
  } else {
    outer = std::string(text);
  }
  if (!std::all_of(outer.begin(), outer.end(), in_entity_charset)) return Classification::rejected;
  if (outer.find("()") == std::string::npos && looks_like_file(outer)) return Classification::file;

  const std::string canonical =
      has_parens ? outer : normalize_entity(outer, cfg.assume_method_without_parens);
  if (is_denied(canonical, cfg)) return Classification::rejected;
  return is_method_name(canonical) ? Classification::method : Classification::rejected;
}

std::vector<std::string> method_mentions(std::string_view body_html, const EntityFilterConfig& cfg) {
  std::vector<std::string> mentions;
  for (const auto& entity : extract_code_entities(body_html, 0, cfg.inline_length_cap)) {
    if (entity.kind == SnippetKind::block) {
      if (cfg.count_blocks) collect_block_calls(entity.raw_text, cfg, mentions);
      continue;
    }
    if (validate_entity(entity, cfg) != Classification::method) continue;
    mentions.push_back(qualify(normalize_entity(entity.raw_text, cfg.assume_method_without_parens), cfg));
  }
  return mentions;
}

std::vector<ApiMethodStats> count_mentions(const ingest::Dataset& dataset,
                                           const EntityFilterConfig& cfg) {
  std::map<std::string, ApiMethodStats> by_name;
  for (const auto& post : dataset.posts()) {
    for (auto& name : method_mentions(post.body_html, cfg)) {
      auto& stats = by_name[name];
      stats.name = name;
      if (post.is_question()) ++stats.question_mentions;
      else ++stats.answer_mentions;
      ++stats.total;
    }
  }
  std::vector<ApiMethodStats> out;
  out.reserve(by_name.size());
  for (auto& [name, stats] : by_name) out.push_back(std::move(stats));
  return out;
}

std::vector<ApiMethodStats> rank_top_k(std::vector<ApiMethodStats> stats,
                                       const EntityFilterConfig& cfg) {
  cfg.validate();
  std::erase_if(stats, [&](const ApiMethodStats& s) { return is_denied(s.name, cfg); });
  std::sort(stats.begin(), stats.end(), [](const ApiMethodStats& a, const ApiMethodStats& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.name < b.name;
  });
  if (stats.size() > cfg.top_k) stats.resize(cfg.top_k);
  return stats;
}

std::set<std::string> parse_denylist(std::string_view text) {
  std::set<std::string> names;
  for (const auto& line : split_lines(text)) {
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    names.emplace(entry);
  }
  return names;
}

std::set<std::string> load_denylist(const std::filesystem::path& path) {
  return parse_denylist(read_file(path));
}

std::map<std::string, std::string> parse_qualifier_map(std::string_view text) {
  std::map<std::string, std::string> map;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    const auto tab = entry.find('\t');
    if (tab == std::string_view::npos) throw FormatError(line_no, "expected 'simple<TAB>qualified'");
    const std::string simple(trim(entry.substr(0, tab)));
    const std::string qualified(trim(entry.substr(tab + 1)));
    if (!is_method_name(simple) || !is_method_name(qualified)) {
      throw FormatError(line_no, "both columns must be method names ending in ()");
    }
    map.emplace(simple, qualified);
  }
  return map;
}

std::map<std::string, std::string> load_qualifier_map(const std::filesystem::path& path) {
  return parse_qualifier_map(read_file(path));
}

std::set<std::string> default_denylist() { return parse_denylist(embedded::denylist()); }

std::map<std::string, std::string> default_qualifier_map() {
  return parse_qualifier_map(embedded::qualifier_map());
}

std::string stats_to_json(const std::vector<ApiMethodStats>& stats) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    arr.push_back({{"name", s.name},
                   {"question_mentions", s.question_mentions},
                   {"answer_mentions", s.answer_mentions},
                   {"total", s.total}});
  }
  return arr.dump(2) + "\n";
}

std::vector<ApiMethodStats> stats_from_json(std::string_view text) {
  std::vector<ApiMethodStats> out;
  try {
    for (const auto& item : nlohmann::json::parse(text)) {
      ApiMethodStats s;
      s.name = item.at("name").get<std::string>();
      s.question_mentions = item.at("question_mentions").get<std::uint64_t>();
      s.answer_mentions = item.at("answer_mentions").get<std::uint64_t>();
      s.total = item.at("total").get<std::uint64_t>();
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid API list: ") + e.what());
  }
  return out;
}

}  // namespace apisum::apix
