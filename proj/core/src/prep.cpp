#include "apisum/prep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "apisum/errors.hpp"
#include "embedded_data.hpp"

namespace apisum::prep {

namespace {

bool is_token_char(char c, bool lowercase) {
  if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_') return true;
  return !lowercase && c >= 'A' && c <= 'Z';
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Single rewrite from the exception dictionary or the first matching suffix
// rule; returns the token unchanged when nothing applies.
std::string apply_rules(const std::string& token,
                        const std::unordered_map<std::string, std::string>& exceptions) {
  if (auto it = exceptions.find(token); it != exceptions.end()) return it->second;
  if (std::any_of(token.begin(), token.end(),
                  [](char c) { return c == '_' || (c >= '0' && c <= '9'); })) {
    return token;
  }
  const std::size_t n = token.size();
  if (ends_with(token, "ies") && n > 3) return token.substr(0, n - 3) + "y";
  if (ends_with(token, "es") && n - 2 >= 3) {
    // Only sibilant plurals take "-es" ("classes", "boxes", "matches");
    // anything else falls through to the plain "-s" rule ("values").
    const std::string stem = token.substr(0, n - 2);
    if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
        ends_with(stem, "ch") || ends_with(stem, "sh")) {
      return stem;
    }
  }
  if (ends_with(token, "s") && n - 1 >= 3 && !ends_with(token, "ss") && !ends_with(token, "us") &&
      !ends_with(token, "is")) {
    return token.substr(0, n - 1);
  }
  if (ends_with(token, "ing") && n - 3 >= 4) {
    std::string stem = token.substr(0, n - 3);
    const std::size_t m = stem.size();
    // "running" -> "runn" -> "run"
    if (stem[m - 1] == stem[m - 2] && !is_vowel(stem[m - 1]) && stem[m - 1] != 'l' &&
        stem[m - 1] != 's' && stem[m - 1] != 'z') {
      stem.pop_back();
    }
    return stem;
  }
  if (ends_with(token, "ed") && n - 2 >= 3 && !ends_with(token, "eed")) {
    std::string stem = token.substr(0, n - 2);
    const std::size_t m = stem.size();
    if (m >= 4 && stem[m - 1] == stem[m - 2] && !is_vowel(stem[m - 1]) && stem[m - 1] != 'l' &&
        stem[m - 1] != 's') {
      stem.pop_back();
    }
    return stem;
  }
  return token;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_each_entry(std::string_view text, Fn&& fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    fn(line, line_no);
  }
}

}  // namespace

PrepConfig PrepConfig::defaults() {
  PrepConfig cfg;
  cfg.stopwords = parse_stopwords(embedded::stopwords());
  cfg.lemma_exceptions = parse_lemma_exceptions(embedded::lemma_exceptions());
  return cfg;
}

Tokens clean(std::string_view sentence, bool lowercase) {
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() &&
        !std::all_of(current.begin(), current.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      tokens.push_back(current);
    }
    current.clear();
  };
  for (char c : sentence) {
    if (lowercase && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (is_token_char(c, lowercase)) current += c;
    else flush();
  }
  flush();
  return tokens;
}

Tokens remove_stopwords(const Tokens& tokens, const PrepConfig& cfg) {
  Tokens out;
  out.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
               [&](const std::string& t) { return cfg.stopwords.count(t) == 0; });
  return out;
}

std::string lemmatize_token(const std::string& token,
                            const std::unordered_map<std::string, std::string>& exceptions) {
  std::string lemma = apply_rules(token, exceptions);
  if (lemma.empty() || apply_rules(lemma, exceptions) != lemma) return token;
  return lemma;
}

Tokens lemmatize(const Tokens& tokens, const PrepConfig& cfg) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatize_token(t, cfg.lemma_exceptions));
  return out;
}

Tokens preprocess(std::string_view sentence, const PrepConfig& cfg) {
  return remove_stopwords(lemmatize(remove_stopwords(clean(sentence, cfg.lowercase), cfg), cfg), cfg);
}

void process_corpus(corpus::ApiCorpus& corpus, const PrepConfig& cfg) {
  for (auto& s : corpus.sentences) s.processed_tokens = preprocess(s.original_text, cfg);
}

corpus::ApiCorpus dedup(const corpus::ApiCorpus& corpus) {
  corpus::ApiCorpus out;
  out.api_name = corpus.api_name;
  out.score_threshold_used = corpus.score_threshold_used;
  std::set<Tokens> seen;
  for (const auto& s : corpus.sentences) {
    if (s.processed_tokens.empty()) continue;
    if (seen.insert(s.processed_tokens).second) out.sentences.push_back(s);
  }
  return out;
}

std::unordered_set<std::string> parse_stopwords(std::string_view text) {
  std::unordered_set<std::string> words;
  for_each_entry(text, [&](const std::string& line, std::size_t) {
    const auto first = line.find_first_not_of(" \t");
    const auto last = line.find_last_not_of(" \t");
    std::string word = line.substr(first, last - first + 1);
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(std::move(word));
  });
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  return parse_stopwords(read_file(path));
}

std::unordered_map<std::string, std::string> parse_lemma_exceptions(std::string_view text) {
  std::unordered_map<std::string, std::string> map;
  for_each_entry(text, [&](const std::string& line, std::size_t line_no) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(line_no, "expected 'form<TAB>lemma'");
    std::string form = line.substr(0, tab);
    std::string lemma = line.substr(tab + 1);
    const auto valid = [](const std::string& w) {
      return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return is_token_char(c, true); });
    };
    if (!valid(form) || !valid(lemma)) {
      throw FormatError(line_no, "forms and lemmas must be lowercase [a-z0-9_] words");
    }
    map.emplace(std::move(form), std::move(lemma));
  });
  return map;
}

std::unordered_map<std::string, std::string> load_lemma_exceptions(const std::filesystem::path& path) {
  return parse_lemma_exceptions(read_file(path));
}

}  // namespace apisum::prep
