#include "apisum/vect.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "apisum/errors.hpp"

namespace apisum::vect {

EmbeddingModel::EmbeddingModel(std::size_t dimension, std::vector<std::string> tokens,
                               std::vector<double> data)
    : dimension_(dimension) {
  if (dimension_ == 0) throw EmptyModel("embedding dimension is 0");
  if (data.size() != tokens.size() * dimension_) {
    throw Error("embedding data does not match vocabulary size x dimension");
  }
  data_.reserve(data.size());
  for (std::size_t row = 0; row < tokens.size(); ++row) {
    if (index_.count(tokens[row])) continue;
    index_.emplace(std::move(tokens[row]), data_.size() / dimension_);
    data_.insert(data_.end(), data.begin() + static_cast<std::ptrdiff_t>(row * dimension_),
                 data.begin() + static_cast<std::ptrdiff_t>((row + 1) * dimension_));
  }
  if (index_.empty()) throw EmptyModel("embedding vocabulary is empty");
}

std::span<const double> EmbeddingModel::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dimension_, dimension_};
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  // strtod accepts forms from_chars (libstdc++ 11) may not; copy for the
  // terminating NUL.
  const std::string buf(text);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

bool parse_size(std::string_view text, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

EmbeddingModel load_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(1, "missing header");
  const auto header = split_spaces(line);
  std::size_t vocab = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], vocab) || !parse_size(header[1], dim)) {
    throw FormatError(1, "header must be 'V D'");
  }
  if (vocab == 0) throw EmptyModel("embedding header declares an empty vocabulary");
  if (dim == 0) throw FormatError(1, "dimension must be positive");

  std::vector<std::string> tokens;
  std::vector<double> data;
  tokens.reserve(vocab);
  data.reserve(vocab * dim);
  std::size_t line_no = 1;
  while (tokens.size() < vocab) {
    if (!std::getline(in, line)) {
      throw FormatError(line_no + 1, "expected " + std::to_string(vocab) + " vectors, found " +
                                         std::to_string(tokens.size()));
    }
    ++line_no;
    const auto fields = split_spaces(line);
    if (fields.size() != dim + 1) {
      throw FormatError(line_no, "expected " + std::to_string(dim) + " components, found " +
                                     std::to_string(fields.empty() ? 0 : fields.size() - 1));
    }
    tokens.emplace_back(fields[0]);
    for (std::size_t k = 1; k <= dim; ++k) {
      double value = 0;
      if (!parse_double(fields[k], value)) {
        throw FormatError(line_no, "non-numeric component '" + std::string(fields[k]) + "'");
      }
      data.push_back(value);
    }
  }
  return EmbeddingModel(dim, std::move(tokens), std::move(data));
}

EmbeddingModel load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings '" + path.string() + "'");
  return load_embeddings(in);
}

SentenceVector embed_sentence(const std::vector<std::string>& tokens, const EmbeddingModel& model) {
  SentenceVector v;
  v.components.assign(model.dimension(), 0.0);
  for (const auto& token : tokens) {
    const auto row = model.lookup(token);
    if (row.empty()) continue;
    for (std::size_t k = 0; k < row.size(); ++k) v.components[k] += row[k];
    ++v.known_token_count;
  }
  if (v.known_token_count > 0) {
    const double n = static_cast<double>(v.known_token_count);
    for (auto& c : v.components) c /= n;
  }
  return v;
}

std::vector<SentenceVector> tfidf_vectors(std::span<const std::vector<std::string>> sentences) {
  std::vector<std::string> vocab;
  std::map<std::string, std::size_t> index;
  for (const auto& tokens : sentences) {
    for (const auto& t : tokens) {
      if (index.emplace(t, vocab.size()).second) vocab.push_back(t);
    }
  }
  std::vector<std::size_t> df(vocab.size(), 0);
  for (const auto& tokens : sentences) {
    std::vector<bool> seen(vocab.size(), false);
    for (const auto& t : tokens) {
      const std::size_t k = index.at(t);
      if (!seen[k]) {
        seen[k] = true;
        ++df[k];
      }
    }
  }
  const double n = static_cast<double>(sentences.size());
  std::vector<SentenceVector> out;
  out.reserve(sentences.size());
  for (const auto& tokens : sentences) {
    SentenceVector v;
    v.components.assign(vocab.size(), 0.0);
    for (const auto& t : tokens) v.components[index.at(t)] += 1.0;
    for (std::size_t k = 0; k < vocab.size(); ++k) {
      if (v.components[k] != 0.0) v.components[k] *= std::log(n / static_cast<double>(df[k]));
    }
    v.known_token_count = tokens.size();
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<SentenceVector> tfidf_vectors(const corpus::ApiCorpus& corpus) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) sentences.push_back(s.processed_tokens);
  return tfidf_vectors(sentences);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace apisum::vect
