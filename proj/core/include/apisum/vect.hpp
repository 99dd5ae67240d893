#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "apisum/corpus.hpp"

namespace apisum::vect {

// Word vectors loaded from a word2vec-style text file. Immutable once built.
class EmbeddingModel {
 public:
  EmbeddingModel(std::size_t dimension, std::vector<std::string> tokens, std::vector<double> data);

  std::size_t dimension() const { return dimension_; }
  std::size_t vocab_size() const { return index_.size(); }

  // Row for `token`, or an empty span when it is out of vocabulary.
  std::span<const double> lookup(const std::string& token) const;

 private:
  std::size_t dimension_;
  std::vector<double> data_;  // row-major, vocab_size x dimension
  std::unordered_map<std::string, std::size_t> index_;
};

// Text format: header "V D", then V lines "token c1 ... cD". Duplicate tokens
// keep their first vector. Throws FormatError, EmptyModel, IoError.
EmbeddingModel load_embeddings(std::istream& in);
EmbeddingModel load_embeddings(const std::filesystem::path& path);

struct SentenceVector {
  std::vector<double> components;
  std::size_t known_token_count = 0;
};

// Mean of the known token vectors; all-zero when no token is known.
SentenceVector embed_sentence(const std::vector<std::string>& tokens, const EmbeddingModel& model);

// tf(t,s) * ln(N / df(t)) over the vocabulary of the given token lists, in
// order of first appearance.
std::vector<SentenceVector> tfidf_vectors(std::span<const std::vector<std::string>> sentences);
std::vector<SentenceVector> tfidf_vectors(const corpus::ApiCorpus& corpus);

// 0 when either norm is 0. Throws DimensionMismatch.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace apisum::vect
