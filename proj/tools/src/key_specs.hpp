#pragma once

#include <string>
#include <vector>

namespace apisum::cli {

// Which subcommands expose a key as a flag.
enum Stage : unsigned {
  kIngest = 1u << 0,
  kExtract = 1u << 1,
  kCorpus = 1u << 2,
  kSummarize = 1u << 3,
  kPipeline = 1u << 4,
};

struct KeySpec {
  const char* key;
  const char* default_value;
  const char* help;
  unsigned stages;
};

const std::vector<KeySpec>& key_specs();

// "top-k" -> "top_k"
std::string normalize_key(std::string key);

}  // namespace apisum::cli
