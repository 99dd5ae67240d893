#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apisum/corpus.hpp"
#include "apisum/ingest.hpp"
#include "apisum/prep.hpp"
#include "apisum/timestamp.hpp"
#include "apisum/vect.hpp"

namespace apisum::rank {

// Dense symmetric weight matrix with a zero diagonal. Graphs built by
// similarity_matrix() have weights in [0, 1]; pagerank() accepts any finite
// nonnegative weights.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  explicit SimilarityGraph(std::size_t n) : n_(n), weights_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }

  // Sets both (i, j) and (j, i). Throws apisum::Error for i == j or a
  // negative or non-finite weight.
  void set_edge(std::size_t i, std::size_t j, double w);

  // Checks symmetry, zero diagonal, sign and finiteness.
  bool valid() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> weights_;
};

// weights[i][j] = max(0, cosine(v_i, v_j)). Throws DimensionMismatch.
SimilarityGraph similarity_matrix(const std::vector<vect::SentenceVector>& vectors);

enum class OrderMode { by_rank, by_position };

const char* to_string(OrderMode mode);
OrderMode order_mode_from_string(std::string_view text);

struct TextRankConfig {
  double damping = 0.85;
  double tolerance = 1e-6;
  std::size_t max_iterations = 100;
  std::size_t top_n = 3;
  OrderMode order_mode = OrderMode::by_rank;

  void validate() const;
};

struct RankVector {
  std::vector<double> scores;
  std::size_t iterations_used = 0;
  bool converged = false;
  double residual = 0.0;  // max |delta| of the last sweep
};

// Weighted TextRank from all-ones initial scores:
//   S_i <- (1 - d) + d * sum_j w_ji / (sum_k w_jk) * S_j
// over neighbours j with nonzero total weight, until the largest change drops
// below the tolerance or max_iterations sweeps have run.
RankVector pagerank(const SimilarityGraph& graph, const TextRankConfig& cfg);

struct SummaryEntry {
  std::string original_text;
  double score = 0.0;
  std::int64_t source_post_id = 0;
  corpus::SourceKind source_kind = corpus::SourceKind::answer_body;
  std::size_t corpus_index = 0;
  std::size_t position = 0;

  friend bool operator==(const SummaryEntry&, const SummaryEntry&) = default;
};

struct Summary {
  std::string api_name;
  std::vector<SummaryEntry> entries;
  std::string config_json;  // serialized snapshot of the effective settings
  Timestamp generated_at{};
};

// Throws EmptyCorpus when the corpus has no sentences.
Summary select_top(const RankVector& ranks, const corpus::ApiCorpus& corpus,
                   const TextRankConfig& cfg);

enum class VectorizerMode { embeddings, tfidf };

const char* to_string(VectorizerMode mode);
VectorizerMode vectorizer_from_string(std::string_view text);

struct SummarizeOptions {
  corpus::CorpusConfig corpus;
  prep::PrepConfig prep = prep::PrepConfig::defaults();
  TextRankConfig rank;
  VectorizerMode vectorizer = VectorizerMode::embeddings;
  const vect::EmbeddingModel* embeddings = nullptr;  // required in embeddings mode
  std::optional<Timestamp> generated_at;              // defaults to now

  std::string snapshot_json() const;
};

struct SummarizeResult {
  Summary summary;
  corpus::ApiCorpus corpus;  // after preprocessing and dedup
  bool corpus_too_small = false;
};

// Preprocess + dedup a raw corpus.
corpus::ApiCorpus prepare_corpus(const corpus::ApiCorpus& raw, const prep::PrepConfig& cfg);

// vectorize -> similarity_matrix -> pagerank -> select_top over a prepared
// corpus.
SummarizeResult summarize_corpus(corpus::ApiCorpus prepared, const SummarizeOptions& options);

// build_corpus -> prep -> dedup -> vectorize -> rank -> select. Throws
// ApiUnknown and EmptyCorpus.
SummarizeResult summarize(const std::string& api_name, const ingest::Dataset& dataset,
                          const SummarizeOptions& options);

std::string summary_to_json(const Summary& summary);

// Sentences joined by single spaces.
std::string render_text(const Summary& summary);

}  // namespace apisum::rank
