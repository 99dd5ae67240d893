#include "apisum/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <nlohmann/json.hpp>

#include "apisum/apix.hpp"
#include "apisum/errors.hpp"
#include "apisum/html.hpp"

namespace apisum::corpus {

namespace {

constexpr std::array<std::pair<SelectionReason, std::string_view>, 5> kReasonNames{{
    {SelectionReason::first_sentence, "first_sentence"},
    {SelectionReason::contains_mention, "contains_mention"},
    {SelectionReason::before_mention, "before_mention"},
    {SelectionReason::after_mention, "after_mention"},
    {SelectionReason::title, "title"},
}};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Lowercased abbreviations whose period never ends a sentence.
bool is_abbreviation(std::string_view token) {
  static constexpr std::array<std::string_view, 9> kAbbrev{"e.g.", "i.e.", "vs.", "mr.", "mrs.",
                                                           "ms.",  "dr.",  "cf.", "fig."};
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kAbbrev.begin(), kAbbrev.end(), lower) != kAbbrev.end();
}

void split_line(std::string_view line, std::vector<Sentence>& out) {
  std::size_t start = 0;
  std::size_t i = 0;
  auto emit = [&](std::size_t end) {
    const auto sentence = trim(line.substr(start, end - start));
    if (!sentence.empty()) out.push_back({std::string(sentence), out.size()});
  };
  while (i < line.size()) {
    const char c = line[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < line.size() && (line[end] == '.' || line[end] == '!' || line[end] == '?')) ++end;
    while (end < line.size() && (line[end] == '"' || line[end] == '\'' || line[end] == ')' ||
                                 line[end] == ']')) {
      ++end;
    }
    std::size_t next = end;
    while (next < line.size() && is_space(line[next])) ++next;
    bool boundary = false;
    if (next == line.size()) {
      boundary = true;
    } else if (next > end) {
      const auto n = static_cast<unsigned char>(line[next]);
      boundary = std::isupper(n) || std::isdigit(n);
    }
    if (boundary && c == '.' && end == i + 1) {
      std::size_t token_start = i;
      while (token_start > 0 && !is_space(line[token_start - 1])) --token_start;
      if (is_abbreviation(line.substr(token_start, end - token_start))) boundary = false;
    }
    if (boundary) {
      emit(end);
      start = next;
    }
    i = std::max(end, i + 1);
  }
  emit(line.size());
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

bool mentions_in_code(std::string_view body_html, std::string_view api_name) {
  for (const auto& span : html::code_spans(body_html)) {
    if (mention_spans(span.text, api_name)) return true;
  }
  return false;
}

}  // namespace

const char* to_string(SourceKind kind) {
  return kind == SourceKind::title ? "title" : "answer_body";
}

SourceKind source_kind_from_string(std::string_view text) {
  if (text == "title") return SourceKind::title;
  if (text == "answer_body") return SourceKind::answer_body;
  throw Error("unknown sentence source kind '" + std::string(text) + "'");
}

std::vector<std::string> SelectionReasons::names() const {
  std::vector<std::string> out;
  for (const auto& [reason, name] : kReasonNames) {
    if (has(reason)) out.emplace_back(name);
  }
  return out;
}

SelectionReasons SelectionReasons::from_names(const std::vector<std::string>& names) {
  SelectionReasons reasons;
  for (const auto& n : names) {
    const auto it = std::find_if(kReasonNames.begin(), kReasonNames.end(),
                                 [&](const auto& entry) { return entry.second == n; });
    if (it == kReasonNames.end()) throw Error("unknown selection reason '" + n + "'");
    reasons.add(it->first);
  }
  return reasons;
}

void CorpusConfig::validate() const {
  if (score_threshold && *score_threshold < 0) throw Error("score threshold must be >= 0");
}

std::int64_t auto_threshold(const ingest::Dataset& dataset) {
  std::int64_t sum = 0;
  std::int64_t n = 0;
  for (const auto& post : dataset.posts()) {
    if (!post.is_answer()) continue;
    sum += post.score;
    ++n;
  }
  if (n == 0) return 0;
  // Integer ceiling division, correct for negative sums as well.
  std::int64_t q = sum / n;
  if (sum % n != 0 && sum > 0) ++q;
  return q;
}

std::int64_t effective_threshold(const ingest::Dataset& dataset, const CorpusConfig& cfg) {
  return cfg.score_threshold ? *cfg.score_threshold : auto_threshold(dataset);
}

bool mention_spans(std::string_view sentence, std::string_view api_name) {
  std::string name = apix::simple_name(api_name);
  name.resize(name.size() - 2);
  if (name.empty()) return false;
  for (auto pos = sentence.find(name); pos != std::string_view::npos;
       pos = sentence.find(name, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(sentence[pos - 1]);
    const std::size_t after = pos + name.size();
    const bool right_ok = after == sentence.size() || !is_word_char(sentence[after]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  for (auto line : lines_of(text)) split_line(line, out);
  return out;
}

std::vector<SelectedPosition> select_positions(std::size_t count,
                                               const std::set<std::size_t>& mentions) {
  std::vector<SelectionReasons> reasons(count);
  if (count == 0) return {};
  reasons[0].add(SelectionReason::first_sentence);
  for (std::size_t m : mentions) {
    if (m >= count) continue;
    reasons[m].add(SelectionReason::contains_mention);
    if (m > 0) reasons[m - 1].add(SelectionReason::before_mention);
    if (m + 1 < count) reasons[m + 1].add(SelectionReason::after_mention);
  }
  std::vector<SelectedPosition> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!reasons[i].empty()) out.push_back({i, reasons[i]});
  }
  return out;
}

std::vector<SentenceRecord> select_sentences(const std::vector<Sentence>& post_sentences,
                                             std::string_view api_name,
                                             std::int64_t source_post_id) {
  std::set<std::size_t> mentions;
  for (std::size_t i = 0; i < post_sentences.size(); ++i) {
    if (mention_spans(post_sentences[i].text, api_name)) mentions.insert(i);
  }
  std::vector<SentenceRecord> records;
  for (const auto& selected : select_positions(post_sentences.size(), mentions)) {
    SentenceRecord record;
    record.original_text = post_sentences[selected.position].text;
    record.source_post_id = source_post_id;
    record.source_kind = SourceKind::answer_body;
    record.position = post_sentences[selected.position].position;
    record.selection_reason = selected.reasons;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<const ingest::RawPost*> eligible_answers(const ingest::Dataset& dataset,
                                                     std::string_view api_name,
                                                     const CorpusConfig& cfg) {
  const std::int64_t threshold = effective_threshold(dataset, cfg);
  std::vector<const ingest::RawPost*> out;
  for (const auto& post : dataset.posts()) {
    if (!post.is_answer() || post.score < threshold) continue;
    if (mention_spans(html::strip_html(post.body_html), api_name)) out.push_back(&post);
  }
  return out;
}

ApiCorpus build_corpus(const ingest::Dataset& dataset, const std::string& api_name,
                       const CorpusConfig& cfg) {
  cfg.validate();
  ApiCorpus corpus;
  corpus.api_name = api_name;
  corpus.score_threshold_used = effective_threshold(dataset, cfg);

  bool mentioned = false;
  std::vector<const ingest::RawPost*> mentioning_questions;
  for (const auto& post : dataset.posts()) {
    const bool in_text = (post.title && mention_spans(*post.title, api_name)) ||
                         mention_spans(html::strip_html(post.body_html), api_name);
    if (in_text && post.is_question()) mentioning_questions.push_back(&post);
    mentioned = mentioned || in_text || mentions_in_code(post.body_html, api_name);
  }
  if (!mentioned) throw ApiUnknown(api_name);

  auto answers = eligible_answers(dataset, api_name, cfg);
  auto by_id = [](const ingest::RawPost* a, const ingest::RawPost* b) { return a->id < b->id; };
  std::sort(answers.begin(), answers.end(), by_id);

  if (cfg.include_titles) {
    std::vector<const ingest::RawPost*> questions;
    if (cfg.titles_scope == TitlesScope::question_mention) {
      questions = mentioning_questions;
    } else {
      for (const auto* answer : answers) {
        if (const auto* q = dataset.find(*answer->parent_id)) questions.push_back(q);
      }
    }
    std::sort(questions.begin(), questions.end(), by_id);
    questions.erase(std::unique(questions.begin(), questions.end()), questions.end());
    for (const auto* q : questions) {
      if (!q->title) continue;
      const auto title = trim(*q->title);
      if (title.empty()) continue;
      SentenceRecord record;
      record.original_text = std::string(title);
      record.source_post_id = q->id;
      record.source_kind = SourceKind::title;
      record.position = 0;
      record.selection_reason.add(SelectionReason::title);
      corpus.sentences.push_back(std::move(record));
    }
  }

  for (const auto* answer : answers) {
    auto records =
        select_sentences(split_sentences(html::strip_html(answer->body_html)), api_name, answer->id);
    for (auto& r : records) corpus.sentences.push_back(std::move(r));
  }
  return corpus;
}

std::string corpus_to_json(const ApiCorpus& corpus) {
  using nlohmann::ordered_json;
  ordered_json sentences = ordered_json::array();
  for (const auto& s : corpus.sentences) {
    sentences.push_back({{"text", s.original_text},
                         {"tokens", s.processed_tokens},
                         {"post_id", s.source_post_id},
                         {"kind", to_string(s.source_kind)},
                         {"position", s.position},
                         {"reasons", s.selection_reason.names()}});
  }
  ordered_json j{{"api", corpus.api_name},
                 {"score_threshold", corpus.score_threshold_used},
                 {"sentences", std::move(sentences)}};
  return j.dump(2) + "\n";
}

ApiCorpus corpus_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ApiCorpus corpus;
    corpus.api_name = j.at("api").get<std::string>();
    corpus.score_threshold_used = j.at("score_threshold").get<std::int64_t>();
    for (const auto& s : j.at("sentences")) {
      SentenceRecord r;
      r.original_text = s.at("text").get<std::string>();
      r.processed_tokens = s.at("tokens").get<std::vector<std::string>>();
      r.source_post_id = s.at("post_id").get<std::int64_t>();
      r.source_kind = source_kind_from_string(s.at("kind").get<std::string>());
      r.position = s.at("position").get<std::size_t>();
      r.selection_reason = SelectionReasons::from_names(s.at("reasons").get<std::vector<std::string>>());
      corpus.sentences.push_back(std::move(r));
    }
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid corpus document: ") + e.what());
  }
}

}  // namespace apisum::corpus
