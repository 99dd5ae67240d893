#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace apisum::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2 };

// Invalid configuration or flags; reported with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective settings as flat key=value pairs. Keys use underscores; the
// command line spells them with dashes (top_k <-> --top-k).
class PipelineConfig {
 public:
  // Every known key at its default value.
  PipelineConfig();

  // Throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool is_set(const std::string& key) const { return !get(key).empty(); }

  const std::map<std::string, std::string>& values() const { return values_; }

  // Overlays a key=value file ('#' comments, blank lines ignored).
  void merge_file(const std::filesystem::path& path);

  // Typed accessors; throw ConfigError on malformed values.
  bool get_bool(const std::string& key) const;
  long long get_int(const std::string& key) const;
  double get_double(const std::string& key) const;

  // Hex SHA-256 over the sorted key=value lines.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

// Keys accepted in config files and as flags.
const std::vector<std::string>& known_keys();

// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ingest -> extract-apis -> per API build-corpus + summarize, writing
// apis.json, corpus/<api>.json, summaries/<api>.json and manifest.json under
// out_dir.
int cmd_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

// File name stem used for per-API artifacts.
std::string artifact_stem(const std::string& api_name);

}  // namespace apisum::cli
