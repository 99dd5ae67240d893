#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "apisum/cli.hpp"
#include "key_specs.hpp"

namespace apisum::cli {

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs{
      {"source", "dump", "Post source: dump (Posts.xml rows), jsonl or remote", kIngest | kPipeline},
      {"input", "", "Dump or JSONL file to ingest", kIngest | kPipeline},
      {"endpoint", "https://api.stackexchange.com/2.3", "Stack Exchange API base URL", kIngest | kPipeline},
      {"site", "stackoverflow", "Stack Exchange site for the remote source", kIngest | kPipeline},
      {"tag", "android", "Question tag to keep", kIngest | kPipeline},
      {"from", "2009-01-01", "First question creation date (inclusive)", kIngest | kPipeline},
      {"to", "2020-04-30", "Last question creation date (inclusive)", kIngest | kPipeline},
      {"lenient", "false", "Skip malformed rows instead of failing", kIngest | kPipeline},
      {"store", "", "Post store written by ingest", kExtract | kCorpus | kSummarize},
      {"top_k", "15", "Number of API methods to keep", kExtract | kPipeline},
      {"denylist", "", "Denylist file (default: bundled list)", kExtract | kPipeline},
      {"qualmap", "", "Qualifier map file (default: bundled map)", kExtract | kPipeline},
      {"count_blocks", "false", "Also count calls inside <pre> code blocks", kExtract | kPipeline},
      {"inline_length_cap", "120", "Inline code longer than this is treated as a block", kExtract | kPipeline},
      {"assume_method_without_parens", "false", "Treat bare names as methods", kExtract | kPipeline},
      {"threshold", "3", "Minimum answer score, or 'auto' for ceil(mean score)", kCorpus | kSummarize | kPipeline},
      {"include_titles", "true", "Add question titles to the corpus", kCorpus | kSummarize | kPipeline},
      {"titles_scope", "question-mention", "Titles to add: question-mention or thread", kCorpus | kSummarize | kPipeline},
      {"stopwords", "", "Stopword file (default: bundled English list)", kCorpus | kSummarize | kPipeline},
      {"lemma_exceptions", "", "Lemma exception file (default: bundled list)", kCorpus | kSummarize | kPipeline},
      {"lowercase", "true", "Lowercase tokens before stopword removal", kCorpus | kSummarize | kPipeline},
      {"vectorizer", "embeddings", "Sentence vectors: embeddings or tfidf", kSummarize | kPipeline},
      {"embeddings", "", "Word embedding text file", kSummarize | kPipeline},
      {"damping", "0.85", "PageRank damping factor", kSummarize | kPipeline},
      {"tolerance", "1e-6", "PageRank convergence tolerance", kSummarize | kPipeline},
      {"max_iterations", "100", "PageRank iteration cap", kSummarize | kPipeline},
      {"top_n", "3", "Sentences per summary", kSummarize | kPipeline},
      {"order_mode", "by_rank", "Summary order: by_rank or by_position", kSummarize | kPipeline},
      {"out_dir", "apisum-out", "Output directory for the pipeline", kPipeline},
  };
  return specs;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& spec : key_specs()) out.emplace_back(spec.key);
    return out;
  }();
  return keys;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

PipelineConfig::PipelineConfig() {
  for (const auto& spec : key_specs()) values_.emplace(spec.key, spec.default_value);
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(normalize_key(key));
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

void PipelineConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    try {
      set(trim(line.substr(0, eq)), value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

bool PipelineConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + " must be a boolean, got '" + v + "'");
}

long long PipelineConfig::get_int(const std::string& key) const {
  const auto& v = get(key);
  errno = 0;
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || errno != 0 || *end != '\0') {
    throw ConfigError(key + " must be an integer, got '" + v + "'");
  }
  return n;
}

double PipelineConfig::get_double(const std::string& key) const {
  const auto& v = get(key);
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || errno != 0 || *end != '\0') {
    throw ConfigError(key + " must be a number, got '" + v + "'");
  }
  return d;
}

std::string PipelineConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : values_) canonical += k + "=" + v + "\n";
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

}  // namespace apisum::cli
