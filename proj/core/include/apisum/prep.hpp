#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "apisum/corpus.hpp"

namespace apisum::prep {

using Tokens = std::vector<std::string>;

struct PrepConfig {
  std::unordered_set<std::string> stopwords;
  // form -> lemma, consulted before the suffix rules
  std::unordered_map<std::string, std::string> lemma_exceptions;
  bool lowercase = true;

  // Bundled English stopwords and lemma exceptions.
  static PrepConfig defaults();
};

Tokens clean(std::string_view sentence, bool lowercase = true);
Tokens remove_stopwords(const Tokens& tokens, const PrepConfig& cfg);

// One lemma per token. A rewrite is kept only when its result is itself left
// unchanged by the rules, so lemmatize(lemmatize(t)) == lemmatize(t).
std::string lemmatize_token(const std::string& token,
                            const std::unordered_map<std::string, std::string>& exceptions);
Tokens lemmatize(const Tokens& tokens, const PrepConfig& cfg);

// clean -> stopwords -> lemmatize -> stopwords. The trailing stopword pass
// drops lemmas that land on a stopword ("wills" -> "will").
Tokens preprocess(std::string_view sentence, const PrepConfig& cfg);

// Fills processed_tokens for every sentence.
void process_corpus(corpus::ApiCorpus& corpus, const PrepConfig& cfg);

// Keeps the first sentence of every group with identical processed tokens and
// drops sentences whose token list is empty.
corpus::ApiCorpus dedup(const corpus::ApiCorpus& corpus);

// Entries are lowercased.
std::unordered_set<std::string> parse_stopwords(std::string_view text);
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);
std::unordered_map<std::string, std::string> parse_lemma_exceptions(std::string_view text);
std::unordered_map<std::string, std::string> load_lemma_exceptions(const std::filesystem::path& path);

}  // namespace apisum::prep
