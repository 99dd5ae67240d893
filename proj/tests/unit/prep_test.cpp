#include <gtest/gtest.h>

#include <random>

#include "apisum/errors.hpp"
#include "apisum/prep.hpp"

namespace apisum::prep {
namespace {

const PrepConfig& cfg() {
  static const PrepConfig c = PrepConfig::defaults();
  return c;
}

std::string lemma(const std::string& t) { return lemmatize_token(t, cfg().lemma_exceptions); }

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

TEST(Clean, Examples) {
  EXPECT_EQ(clean("Call finish() now!"), (Tokens{"call", "finish", "now"}));
  EXPECT_EQ(clean("in 2015 it worked"), (Tokens{"in", "it", "worked"}));
  EXPECT_EQ(clean(""), Tokens{});
  EXPECT_EQ(clean("on_create v2 <b>x</b>"), (Tokens{"on_create", "v2", "b", "x", "b"}));
  EXPECT_EQ(clean("Keep Case", false), (Tokens{"Keep", "Case"}));
}

TEST(RemoveStopwords, Examples) {
  EXPECT_EQ(remove_stopwords({"call", "the", "method"}, cfg()), (Tokens{"call", "method"}));
  EXPECT_EQ(remove_stopwords({"the", "a", "of"}, cfg()), Tokens{});
  EXPECT_EQ(remove_stopwords({}, cfg()), Tokens{});
}

TEST(Lemmatize, Examples) {
  EXPECT_EQ(lemma("activities"), "activity");
  EXPECT_EQ(lemma("running"), "run");
  EXPECT_EQ(lemma("onpostexecute"), "onpostexecute");
  EXPECT_EQ(lemma("ran"), "run");
  EXPECT_EQ(lemma("children"), "child");
  EXPECT_EQ(lemma("classes"), "class");
  EXPECT_EQ(lemma("views"), "view");
  EXPECT_EQ(lemma("status"), "status");
  EXPECT_EQ(lemma("this"), "this");
  EXPECT_EQ(lemma("v2s"), "v2s");
  EXPECT_EQ(lemma("on_items"), "on_items");
}

TEST(Lemmatize, SuffixRuleExamples) {
  EXPECT_EQ(lemma("clicked"), "click");
  EXPECT_EQ(lemma("inflated"), "inflate");  // exception entry
  EXPECT_EQ(lemma("stopped"), "stop");
  EXPECT_EQ(lemma("needed"), "need");
  EXPECT_EQ(lemma("boxes"), "box");
  EXPECT_EQ(lemma("calling"), "call");
}

TEST(Preprocess, PipelineOrder) {
  EXPECT_EQ(preprocess("The activities are running!", cfg()), (Tokens{"activity", "run"}));
}

Tokens random_sentence_tokens(std::mt19937& rng) {
  static const std::vector<std::string> words{
      "the", "activities", "running", "calls", "classes", "boxes", "stopped", "views", "is",
      "was", "children", "went", "onCreate()", "2015", "R.id.button", "isn't", "wills",
      "processes", "studies", "added", "setting", "buses", "sss", "hopping", "filling", "ies",
      "buzzing", "agreed", "mixed", "does", "alias", "analyses", "Caf\xC3\xA9", "_x", "x_1", "a"};
  Tokens out;
  const int n = 1 + static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) out.push_back(words[rng() % words.size()]);
  return out;
}

TEST(Preprocess, IdempotentOnOwnOutput) {
  std::mt19937 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const auto once = preprocess(join(random_sentence_tokens(rng)), cfg());
    EXPECT_EQ(preprocess(join(once), cfg()), once) << join(once);
  }
}

TEST(Lemmatize, IdempotentOverRandomWords) {
  std::mt19937 rng(5);
  const std::string letters = "abcdeilnosstuyzgh";
  for (int i = 0; i < 5000; ++i) {
    std::string w;
    const int len = 2 + static_cast<int>(rng() % 9);
    for (int k = 0; k < len; ++k) w += letters[rng() % letters.size()];
    const auto once = lemma(w);
    EXPECT_EQ(lemma(once), once) << w;
  }
}

corpus::SentenceRecord record(std::string text, Tokens tokens) {
  corpus::SentenceRecord r;
  r.original_text = std::move(text);
  r.processed_tokens = std::move(tokens);
  r.selection_reason.add(corpus::SelectionReason::first_sentence);
  return r;
}

TEST(Dedup, KeepsFirstAndDropsEmpty) {
  corpus::ApiCorpus c;
  c.sentences = {record("Use finish.", {"use", "finish"}), record("The end", {}),
                 record("Using finish!", {"use", "finish"}), record("Other.", {"other"})};
  const auto d = dedup(c);
  ASSERT_EQ(d.sentences.size(), 2u);
  EXPECT_EQ(d.sentences[0].original_text, "Use finish.");
  EXPECT_EQ(d.sentences[1].original_text, "Other.");
  EXPECT_EQ(dedup(d), d);
}

TEST(ProcessCorpus, LeavesOriginalTextAlone) {
  corpus::ApiCorpus c;
  c.sentences = {record("Calling finish() twice!", {})};
  process_corpus(c, cfg());
  EXPECT_EQ(c.sentences[0].original_text, "Calling finish() twice!");
  EXPECT_EQ(c.sentences[0].processed_tokens, (Tokens{"call", "finish", "twice"}));
}

TEST(DataFiles, Parsing) {
  const auto stop = parse_stopwords("# c\nThe\n\nof \n");
  EXPECT_EQ(stop, (std::unordered_set<std::string>{"the", "of"}));
  const auto ex = parse_lemma_exceptions("ran\trun\n");
  EXPECT_EQ(ex.at("ran"), "run");
  EXPECT_THROW(parse_lemma_exceptions("bad line\n"), FormatError);
  EXPECT_FALSE(cfg().stopwords.empty());
}

}  // namespace
}  // namespace apisum::prep
