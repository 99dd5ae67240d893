#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apisum/ingest.hpp"

namespace apisum::corpus {

enum class SourceKind { title, answer_body };

const char* to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view text);

enum class SelectionReason : unsigned {
  first_sentence = 1u << 0,
  contains_mention = 1u << 1,
  before_mention = 1u << 2,
  after_mention = 1u << 3,
  title = 1u << 4,
};

// Bit set of SelectionReason values.
class SelectionReasons {
 public:
  SelectionReasons() = default;
  SelectionReasons(std::initializer_list<SelectionReason> reasons) {
    for (auto r : reasons) add(r);
  }
  void add(SelectionReason r) { bits_ |= static_cast<unsigned>(r); }
  bool has(SelectionReason r) const { return (bits_ & static_cast<unsigned>(r)) != 0; }
  bool empty() const { return bits_ == 0; }
  unsigned bits() const { return bits_; }

  std::vector<std::string> names() const;
  static SelectionReasons from_names(const std::vector<std::string>& names);

  friend bool operator==(SelectionReasons, SelectionReasons) = default;

 private:
  unsigned bits_ = 0;
};

struct SentenceRecord {
  std::string original_text;
  std::vector<std::string> processed_tokens;
  std::int64_t source_post_id = 0;
  SourceKind source_kind = SourceKind::answer_body;
  std::size_t position = 0;
  SelectionReasons selection_reason;

  friend bool operator==(const SentenceRecord&, const SentenceRecord&) = default;
};

struct ApiCorpus {
  std::string api_name;
  std::vector<SentenceRecord> sentences;
  std::int64_t score_threshold_used = 0;

  friend bool operator==(const ApiCorpus&, const ApiCorpus&) = default;
};

enum class TitlesScope {
  question_mention,  // questions whose title or body mentions the API
  thread,            // questions owning at least one eligible answer
};

struct CorpusConfig {
  // nullopt selects the automatic threshold: ceil(mean answer score).
  std::optional<std::int64_t> score_threshold = 3;
  bool include_titles = true;
  TitlesScope titles_scope = TitlesScope::question_mention;

  void validate() const;
};

// ceil(mean score over all answers); 0 when there are no answers.
std::int64_t auto_threshold(const ingest::Dataset& dataset);
std::int64_t effective_threshold(const ingest::Dataset& dataset, const CorpusConfig& cfg);

// Whole-word, case-sensitive occurrence of the API's simple name (final dotted
// segment without the parentheses).
bool mention_spans(std::string_view sentence, std::string_view api_name);

struct Sentence {
  std::string text;
  std::size_t position = 0;
};

std::vector<Sentence> split_sentences(std::string_view text);

struct SelectedPosition {
  std::size_t position = 0;
  SelectionReasons reasons;
};

// {0} ∪ mentions ∪ (mentions ± 1), clipped to [0, count), ascending.
std::vector<SelectedPosition> select_positions(std::size_t count,
                                               const std::set<std::size_t>& mentions);

std::vector<SentenceRecord> select_sentences(const std::vector<Sentence>& post_sentences,
                                             std::string_view api_name,
                                             std::int64_t source_post_id = 0);

std::vector<const ingest::RawPost*> eligible_answers(const ingest::Dataset& dataset,
                                                     std::string_view api_name,
                                                     const CorpusConfig& cfg);

// Throws ApiUnknown when the API is not mentioned anywhere in the dataset.
ApiCorpus build_corpus(const ingest::Dataset& dataset, const std::string& api_name,
                       const CorpusConfig& cfg);

std::string corpus_to_json(const ApiCorpus& corpus);
ApiCorpus corpus_from_json(std::string_view text);

}  // namespace apisum::corpus
