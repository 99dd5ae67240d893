#include "apisum/rank.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "apisum/errors.hpp"

namespace apisum::rank {

void SimilarityGraph::set_edge(std::size_t i, std::size_t j, double w) {
  if (i == j) throw Error("similarity graph has no self loops");
  if (!(w >= 0.0) || !std::isfinite(w)) throw Error("edge weight must be finite and nonnegative");
  weights_[i * n_ + j] = w;
  weights_[j * n_ + i] = w;
}

bool SimilarityGraph::valid() const {
  for (std::size_t i = 0; i < n_; ++i) {
    if (weight(i, i) != 0.0) return false;
    for (std::size_t j = 0; j < n_; ++j) {
      const double w = weight(i, j);
      if (!std::isfinite(w) || w < 0.0 || w != weight(j, i)) return false;
    }
  }
  return true;
}

SimilarityGraph similarity_matrix(const std::vector<vect::SentenceVector>& vectors) {
  SimilarityGraph g(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      g.set_edge(i, j, std::max(0.0, vect::cosine(vectors[i].components, vectors[j].components)));
    }
  }
  return g;
}

const char* to_string(OrderMode mode) {
  return mode == OrderMode::by_rank ? "by_rank" : "by_position";
}

OrderMode order_mode_from_string(std::string_view text) {
  if (text == "by_rank") return OrderMode::by_rank;
  if (text == "by_position") return OrderMode::by_position;
  throw Error("unknown order mode '" + std::string(text) + "'");
}

void TextRankConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw Error("damping must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw Error("tolerance must be positive");
  if (max_iterations < 1) throw Error("max_iterations must be positive");
  if (top_n < 1) throw Error("top_n must be positive");
}

RankVector pagerank(const SimilarityGraph& graph, const TextRankConfig& cfg) {
  cfg.validate();
  const std::size_t n = graph.size();
  RankVector result;
  result.scores.assign(n, 1.0);
  if (n == 0) {
    result.converged = true;
    return result;
  }

  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) out_weight[j] += graph.weight(j, k);
  }

  const double base = 1.0 - cfg.damping;
  std::vector<double> next(n);
  while (result.iterations_used < cfg.max_iterations) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double w = graph.weight(j, i);
        if (w > 0.0 && out_weight[j] > 0.0) incoming += w / out_weight[j] * result.scores[j];
      }
      next[i] = base + cfg.damping * incoming;
      residual = std::max(residual, std::abs(next[i] - result.scores[i]));
    }
    result.scores.swap(next);
    ++result.iterations_used;
    result.residual = residual;
    if (residual < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Summary select_top(const RankVector& ranks, const corpus::ApiCorpus& corpus,
                   const TextRankConfig& cfg) {
  cfg.validate();
  if (corpus.sentences.empty()) throw EmptyCorpus(corpus.api_name);
  if (ranks.scores.size() != corpus.sentences.size()) {
    throw DimensionMismatch(ranks.scores.size(), corpus.sentences.size());
  }
  std::vector<std::size_t> order(corpus.sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks.scores[a] > ranks.scores[b];
  });
  order.resize(std::min(cfg.top_n, order.size()));

  Summary summary;
  summary.api_name = corpus.api_name;
  for (std::size_t idx : order) {
    const auto& s = corpus.sentences[idx];
    summary.entries.push_back(
        {s.original_text, ranks.scores[idx], s.source_post_id, s.source_kind, idx, s.position});
  }
  if (cfg.order_mode == OrderMode::by_position) {
    std::sort(summary.entries.begin(), summary.entries.end(),
              [](const SummaryEntry& a, const SummaryEntry& b) {
                return std::tie(a.source_post_id, a.position, a.corpus_index) <
                       std::tie(b.source_post_id, b.position, b.corpus_index);
              });
  }
  return summary;
}

const char* to_string(VectorizerMode mode) {
  return mode == VectorizerMode::embeddings ? "embeddings" : "tfidf";
}

VectorizerMode vectorizer_from_string(std::string_view text) {
  if (text == "embeddings") return VectorizerMode::embeddings;
  if (text == "tfidf") return VectorizerMode::tfidf;
  throw Error("unknown vectorizer '" + std::string(text) + "'");
}

std::string SummarizeOptions::snapshot_json() const {
  nlohmann::ordered_json j{
      {"damping", rank.damping},
      {"tolerance", rank.tolerance},
      {"max_iterations", rank.max_iterations},
      {"top_n", rank.top_n},
      {"order_mode", to_string(rank.order_mode)},
      {"vectorizer", to_string(vectorizer)},
      {"score_threshold", corpus.score_threshold ? nlohmann::ordered_json(*corpus.score_threshold)
                                                 : nlohmann::ordered_json("auto")},
      {"include_titles", corpus.include_titles},
      {"titles_scope", corpus.titles_scope == corpus::TitlesScope::thread ? "thread"
                                                                          : "question-mention"},
      {"lowercase", prep.lowercase},
      {"stopword_count", prep.stopwords.size()},
      {"lemma_exception_count", prep.lemma_exceptions.size()},
  };
  if (embeddings) {
    j["embedding_dimension"] = embeddings->dimension();
    j["embedding_vocab_size"] = embeddings->vocab_size();
  }
  return j.dump();
}

corpus::ApiCorpus prepare_corpus(const corpus::ApiCorpus& raw, const prep::PrepConfig& cfg) {
  corpus::ApiCorpus processed = raw;
  prep::process_corpus(processed, cfg);
  return prep::dedup(processed);
}

SummarizeResult summarize_corpus(corpus::ApiCorpus prepared, const SummarizeOptions& options) {
  options.rank.validate();
  if (options.vectorizer == VectorizerMode::embeddings && options.embeddings == nullptr) {
    throw Error("embeddings vectorizer selected but no embedding model loaded");
  }
  if (prepared.sentences.empty()) throw EmptyCorpus(prepared.api_name);

  std::vector<vect::SentenceVector> vectors;
  if (options.vectorizer == VectorizerMode::tfidf) {
    vectors = vect::tfidf_vectors(prepared);
  } else {
    vectors.reserve(prepared.sentences.size());
    for (const auto& s : prepared.sentences) {
      vectors.push_back(vect::embed_sentence(s.processed_tokens, *options.embeddings));
    }
  }
  const RankVector ranks = pagerank(similarity_matrix(vectors), options.rank);

  SummarizeResult result;
  result.summary = select_top(ranks, prepared, options.rank);
  result.summary.config_json = options.snapshot_json();
  result.summary.generated_at =
      options.generated_at.value_or(std::chrono::time_point_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now()));
  result.corpus_too_small = prepared.sentences.size() < options.rank.top_n;
  result.corpus = std::move(prepared);
  return result;
}

SummarizeResult summarize(const std::string& api_name, const ingest::Dataset& dataset,
                          const SummarizeOptions& options) {
  const auto raw = corpus::build_corpus(dataset, api_name, options.corpus);
  return summarize_corpus(prepare_corpus(raw, options.prep), options);
}

std::string summary_to_json(const Summary& summary) {
  using nlohmann::ordered_json;
  ordered_json entries = ordered_json::array();
  for (const auto& e : summary.entries) {
    entries.push_back({{"text", e.original_text},
                       {"score", e.score},
                       {"post_id", e.source_post_id},
                       {"kind", corpus::to_string(e.source_kind)},
                       {"index", e.corpus_index}});
  }
  ordered_json j{{"api", summary.api_name},
                 {"generated_at", format_timestamp(summary.generated_at) + "Z"},
                 {"config", summary.config_json.empty() ? ordered_json::object()
                                                        : ordered_json::parse(summary.config_json)},
                 {"entries", std::move(entries)}};
  return j.dump(2) + "\n";
}

std::string render_text(const Summary& summary) {
  std::string out;
  for (const auto& e : summary.entries) {
    if (!out.empty()) out += ' ';
    out += e.original_text;
  }
  return out;
}

}  // namespace apisum::rank
