#include "apisum/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apisum/apix.hpp"
#include "apisum/corpus.hpp"
#include "apisum/errors.hpp"
#include "apisum/ingest.hpp"
#include "apisum/prep.hpp"
#include "apisum/rank.hpp"
#include "apisum/vect.hpp"
#include "key_specs.hpp"

namespace apisum::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Wraps library validation failures so they map to exit code 2.
template <typename Fn>
auto as_config_error(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void require_existing(const PipelineConfig& cfg, const std::string& key) {
  const auto& value = cfg.get(key);
  if (value.empty()) throw ConfigError("missing required setting '" + key + "'");
  if (!fs::exists(value)) throw ConfigError(key + " path does not exist: " + value);
}

void check_optional_file(const PipelineConfig& cfg, const std::string& key) {
  if (cfg.is_set(key) && !fs::exists(cfg.get(key))) {
    throw ConfigError(key + " path does not exist: " + cfg.get(key));
  }
}

ingest::IngestConfig make_ingest_config(const PipelineConfig& cfg) {
  return as_config_error([&] {
    ingest::IngestConfig ic;
    ic.tag = cfg.get("tag");
    ic.date_from = parse_timestamp(cfg.get("from"));
    const auto& to = cfg.get("to");
    ic.date_to = to.size() == 10 ? end_of_day(parse_timestamp(to)) : parse_timestamp(to);
    const auto& source = cfg.get("source");
    if (source == "dump") ic.source = ingest::SourceKind::dump_file;
    else if (source == "jsonl") ic.source = ingest::SourceKind::jsonl_file;
    else if (source == "remote") ic.source = ingest::SourceKind::remote;
    else throw ConfigError("source must be dump, jsonl or remote");
    ic.validate();
    if (ic.source != ingest::SourceKind::remote) require_existing(cfg, "input");
    return ic;
  });
}

apix::EntityFilterConfig make_filter_config(const PipelineConfig& cfg) {
  check_optional_file(cfg, "denylist");
  check_optional_file(cfg, "qualmap");
  const long long top_k = cfg.get_int("top_k");
  const long long cap = cfg.get_int("inline_length_cap");
  if (top_k < 1) throw ConfigError("top_k must be at least 1");
  if (cap < 1) throw ConfigError("inline_length_cap must be positive");
  return as_config_error([&] {
    apix::EntityFilterConfig fc;
    fc.top_k = static_cast<std::size_t>(top_k);
    fc.inline_length_cap = static_cast<std::size_t>(cap);
    fc.count_blocks = cfg.get_bool("count_blocks");
    fc.assume_method_without_parens = cfg.get_bool("assume_method_without_parens");
    fc.denylist = cfg.is_set("denylist") ? apix::load_denylist(cfg.get("denylist"))
                                         : apix::default_denylist();
    fc.qualifiers = cfg.is_set("qualmap") ? apix::load_qualifier_map(cfg.get("qualmap"))
                                          : apix::default_qualifier_map();
    return fc;
  });
}

corpus::CorpusConfig make_corpus_config(const PipelineConfig& cfg) {
  corpus::CorpusConfig cc;
  if (cfg.get("threshold") == "auto") {
    cc.score_threshold.reset();
  } else {
    cc.score_threshold = cfg.get_int("threshold");
  }
  cc.include_titles = cfg.get_bool("include_titles");
  const auto& scope = cfg.get("titles_scope");
  if (scope == "question-mention" || scope == "question_mention") {
    cc.titles_scope = corpus::TitlesScope::question_mention;
  } else if (scope == "thread") {
    cc.titles_scope = corpus::TitlesScope::thread;
  } else {
    throw ConfigError("titles_scope must be question-mention or thread");
  }
  as_config_error([&] { cc.validate(); });
  return cc;
}

prep::PrepConfig make_prep_config(const PipelineConfig& cfg) {
  check_optional_file(cfg, "stopwords");
  check_optional_file(cfg, "lemma_exceptions");
  return as_config_error([&] {
    auto pc = prep::PrepConfig::defaults();
    if (cfg.is_set("stopwords")) pc.stopwords = prep::load_stopwords(cfg.get("stopwords"));
    if (cfg.is_set("lemma_exceptions")) {
      pc.lemma_exceptions = prep::load_lemma_exceptions(cfg.get("lemma_exceptions"));
    }
    pc.lowercase = cfg.get_bool("lowercase");
    return pc;
  });
}

rank::TextRankConfig make_rank_config(const PipelineConfig& cfg) {
  rank::TextRankConfig rc;
  rc.damping = cfg.get_double("damping");
  rc.tolerance = cfg.get_double("tolerance");
  const long long iters = cfg.get_int("max_iterations");
  const long long top_n = cfg.get_int("top_n");
  if (iters < 1) throw ConfigError("max_iterations must be positive");
  if (top_n < 1) throw ConfigError("top_n must be positive");
  rc.max_iterations = static_cast<std::size_t>(iters);
  rc.top_n = static_cast<std::size_t>(top_n);
  as_config_error([&] {
    rc.order_mode = rank::order_mode_from_string(cfg.get("order_mode"));
    rc.validate();
  });
  return rc;
}

// Validated summarize settings; the embedding model is loaded separately.
rank::SummarizeOptions make_summarize_options(const PipelineConfig& cfg) {
  rank::SummarizeOptions opts;
  opts.corpus = make_corpus_config(cfg);
  opts.prep = make_prep_config(cfg);
  opts.rank = make_rank_config(cfg);
  opts.vectorizer = as_config_error([&] { return rank::vectorizer_from_string(cfg.get("vectorizer")); });
  if (opts.vectorizer == rank::VectorizerMode::embeddings) require_existing(cfg, "embeddings");
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    opts.generated_at = from_unix_seconds(std::strtoll(epoch, nullptr, 10));
  }
  return opts;
}

std::optional<vect::EmbeddingModel> load_model(const PipelineConfig& cfg,
                                               const rank::SummarizeOptions& opts) {
  if (opts.vectorizer != rank::VectorizerMode::embeddings) return std::nullopt;
  return vect::load_embeddings(fs::path(cfg.get("embeddings")));
}

ingest::Dataset acquire_posts(const PipelineConfig& cfg, const ingest::IngestConfig& ic,
                              std::ostream& err) {
  std::vector<ingest::RawPost> posts;
  if (ic.source == ingest::SourceKind::remote) {
    ingest::RemoteOptions ro;
    ro.site = cfg.get("site");
    posts = ingest::fetch_remote(ic, cfg.get("endpoint"), ro);
  } else {
    std::ifstream in(cfg.get("input"), std::ios::binary);
    if (!in) throw IoError("cannot open input '" + cfg.get("input") + "'");
    const auto format = ic.source == ingest::SourceKind::dump_file ? ingest::DumpFormat::xml_rows
                                                                   : ingest::DumpFormat::jsonl;
    ingest::PostReader reader(in, format, {cfg.get_bool("lenient")});
    while (auto post = reader.next()) posts.push_back(std::move(*post));
    if (reader.skipped_malformed() > 0) {
      err << "warning: skipped " << reader.skipped_malformed() << " malformed rows\n";
    }
  }
  return ingest::filter_dataset(posts, ic);
}

ingest::Dataset load_store(const PipelineConfig& cfg) {
  require_existing(cfg, "store");
  return ingest::store_load(cfg.get("store"));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path.empty() || out_path == "-") out << text;
  else write_text(out_path, text);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FlagOnly {
  std::string out;
  std::string api;
  std::string corpus;
  bool text = false;
  std::string config;
};

int cmd_ingest(const PipelineConfig& cfg, const FlagOnly& flags, std::ostream& out, std::ostream& err) {
  const auto ic = make_ingest_config(cfg);
  if (flags.out.empty()) throw ConfigError("ingest requires --out STORE");
  const auto dataset = acquire_posts(cfg, ic, err);
  ingest::store_save(dataset, flags.out);
  out << "stored " << dataset.question_count() << " questions and " << dataset.answer_count()
      << " answers in " << flags.out << "\n";
  return kOk;
}

int cmd_extract(const PipelineConfig& cfg, const FlagOnly& flags, std::ostream& out) {
  const auto fc = make_filter_config(cfg);
  const auto dataset = load_store(cfg);
  const auto top = apix::rank_top_k(apix::count_mentions(dataset, fc), fc);
  emit(flags.out, apix::stats_to_json(top), out);
  return kOk;
}

int cmd_build_corpus(const PipelineConfig& cfg, const FlagOnly& flags, std::ostream& out) {
  const auto cc = make_corpus_config(cfg);
  const auto pc = make_prep_config(cfg);
  if (flags.api.empty()) throw ConfigError("build-corpus requires --api NAME");
  const auto dataset = load_store(cfg);
  const auto prepared = rank::prepare_corpus(corpus::build_corpus(dataset, flags.api, cc), pc);
  emit(flags.out, corpus::corpus_to_json(prepared), out);
  return kOk;
}

int cmd_summarize(const PipelineConfig& cfg, const FlagOnly& flags, std::ostream& out,
                  std::ostream& err) {
  auto opts = make_summarize_options(cfg);
  std::optional<corpus::ApiCorpus> prepared;
  std::optional<ingest::Dataset> dataset;
  if (!flags.corpus.empty()) {
    if (!fs::exists(flags.corpus)) throw ConfigError("corpus path does not exist: " + flags.corpus);
  } else {
    if (flags.api.empty()) throw ConfigError("summarize requires --api NAME or --corpus PATH");
    require_existing(cfg, "store");
  }
  const auto model = load_model(cfg, opts);
  opts.embeddings = model ? &*model : nullptr;

  rank::SummarizeResult result;
  if (!flags.corpus.empty()) {
    result = rank::summarize_corpus(corpus::corpus_from_json(read_text(flags.corpus)), opts);
  } else {
    result = rank::summarize(flags.api, load_store(cfg), opts);
  }
  if (result.corpus_too_small) {
    err << "warning: corpus for " << result.summary.api_name << " has only "
        << result.corpus.sentences.size() << " sentences (top_n " << opts.rank.top_n << ")\n";
  }
  if (flags.text) {
    out << rank::render_text(result.summary) << "\n";
    if (!flags.out.empty()) write_text(flags.out, rank::summary_to_json(result.summary));
  } else {
    emit(flags.out, rank::summary_to_json(result.summary), out);
  }
  return kOk;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string artifact_stem(const std::string& api_name) {
  std::string stem;
  for (std::size_t i = 0; i < api_name.size(); ++i) {
    const char c = api_name[i];
    if (c == '(' && i + 1 < api_name.size() && api_name[i + 1] == ')') {
      ++i;
      continue;
    }
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
    stem += safe ? c : '_';
  }
  return stem.empty() ? "_" : stem;
}

int cmd_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  // Everything that can be a configuration error is checked before any
  // artifact is written.
  ingest::IngestConfig ic;
  apix::EntityFilterConfig fc;
  rank::SummarizeOptions opts;
  try {
    ic = make_ingest_config(cfg);
    fc = make_filter_config(cfg);
    opts = make_summarize_options(cfg);
    if (cfg.get("out_dir").empty()) throw ConfigError("out_dir must be set");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  ordered_json stages = ordered_json::array();
  ordered_json api_reports = ordered_json::array();
  int exit_code = kOk;
  const fs::path out_dir = cfg.get("out_dir");

  try {
    auto t = Clock::now();
    const auto model = load_model(cfg, opts);
    opts.embeddings = model ? &*model : nullptr;

    const auto dataset = acquire_posts(cfg, ic, err);
    fs::create_directories(out_dir);
    ingest::store_save(dataset, out_dir / "posts.store");
    stages.push_back({{"stage", "ingest"}, {"seconds", seconds_since(t)}});

    t = Clock::now();
    const auto top = apix::rank_top_k(apix::count_mentions(dataset, fc), fc);
    write_text(out_dir / "apis.json", apix::stats_to_json(top));
    stages.push_back({{"stage", "extract-apis"}, {"seconds", seconds_since(t)}});

    t = Clock::now();
    for (const auto& api : top) {
      ordered_json report{{"api", api.name}, {"file", artifact_stem(api.name) + ".json"}};
      try {
        const auto raw = corpus::build_corpus(dataset, api.name, opts.corpus);
        const auto prepared = rank::prepare_corpus(raw, opts.prep);
        write_text(out_dir / "corpus" / (artifact_stem(api.name) + ".json"),
                   corpus::corpus_to_json(prepared));
        const auto result = rank::summarize_corpus(prepared, opts);
        write_text(out_dir / "summaries" / (artifact_stem(api.name) + ".json"),
                   rank::summary_to_json(result.summary));
        report["status"] = "ok";
        report["corpus_sentences"] = result.corpus.sentences.size();
        report["summary_entries"] = result.summary.entries.size();
        if (result.corpus_too_small) {
          report["warning"] = "CorpusTooSmall";
          err << "warning: corpus for " << api.name << " has fewer than " << opts.rank.top_n
              << " sentences\n";
        }
      } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = e.what();
        err << "error: " << api.name << ": " << e.what() << "\n";
        exit_code = kFailure;
      }
      api_reports.push_back(std::move(report));
    }
    stages.push_back({{"stage", "summarize"}, {"seconds", seconds_since(t)}});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    exit_code = kFailure;
  }

  const std::size_t api_count = api_reports.size();
  if (fs::exists(out_dir)) {
    ordered_json manifest{{"tool", "apisum"},
                          {"config_hash", cfg.hash()},
                          {"config", cfg.values()},
                          {"stages", std::move(stages)},
                          {"apis", std::move(api_reports)},
                          {"exit_code", exit_code}};
    try {
      write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      exit_code = kFailure;
    }
  }
  if (exit_code == kOk) out << "wrote " << api_count << " summaries to " << out_dir.string() << "\n";
  return exit_code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"apisum - extractive summaries of API methods discussed in Q&A posts", "apisum"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    unsigned stage;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<std::unique_ptr<Command>> commands;
  FlagOnly flags;

  auto add_command = [&](const char* name, const char* description, unsigned stage) {
    auto cmd = std::make_unique<Command>();
    cmd->app = app.add_subcommand(name, description);
    cmd->stage = stage;
    cmd->app->add_option("--config", flags.config, "key=value config file (env: APISUM_CONFIG)");
    for (const auto& spec : key_specs()) {
      if (!(spec.stages & stage)) continue;
      std::string flag = "--" + std::string(spec.key);
      std::replace(flag.begin(), flag.end(), '_', '-');
      const std::string def = spec.default_value;
      auto& slot = cmd->values[spec.key];
      CLI::Option* opt = nullptr;
      if (def == "true" || def == "false") {
        opt = cmd->app->add_flag(flag + "{true}", slot, spec.help);
      } else {
        opt = cmd->app->add_option(flag, slot, spec.help);
      }
      opt->default_str(def);
      cmd->options[spec.key] = opt;
    }
    Command* raw = cmd.get();
    commands.push_back(std::move(cmd));
    return raw;
  };

  auto* ingest_cmd = add_command("ingest", "Parse and filter posts into a store", kIngest);
  ingest_cmd->app->add_option("--out", flags.out, "Store file to write");
  auto* extract_cmd = add_command("extract-apis", "Count and rank API method mentions", kExtract);
  extract_cmd->app->add_option("--out", flags.out, "apis.json path (default: stdout)");
  auto* corpus_cmd = add_command("build-corpus", "Assemble the sentence corpus for one API", kCorpus);
  corpus_cmd->app->add_option("--api", flags.api, "Canonical API name, e.g. app.Activity.onCreate()");
  corpus_cmd->app->add_option("--out", flags.out, "corpus.json path (default: stdout)");
  auto* summarize_cmd = add_command("summarize", "Rank corpus sentences and emit a summary", kSummarize);
  summarize_cmd->app->add_option("--api", flags.api, "Canonical API name");
  summarize_cmd->app->add_option("--corpus", flags.corpus, "Prepared corpus from build-corpus");
  summarize_cmd->app->add_option("--out", flags.out, "summary.json path (default: stdout)");
  summarize_cmd->app->add_flag("--text", flags.text, "Print the summary as plain text");
  auto* pipeline_cmd = add_command("pipeline", "Run every stage and write all artifacts", kPipeline);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  Command* active = nullptr;
  for (auto& cmd : commands) {
    if (cmd->app->parsed()) active = cmd.get();
  }
  if (!active) return kConfigError;

  PipelineConfig cfg;
  try {
    std::string config_path = flags.config;
    if (config_path.empty()) {
      if (const char* env = std::getenv("APISUM_CONFIG"); env && *env) config_path = env;
    }
    if (!config_path.empty()) cfg.merge_file(config_path);
    for (const auto& [key, opt] : active->options) {
      if (opt->count() > 0) cfg.set(key, active->values[key]);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  if (active == pipeline_cmd) return cmd_pipeline(cfg, out, err);
  try {
    if (active == ingest_cmd) return cmd_ingest(cfg, flags, out, err);
    if (active == extract_cmd) return cmd_extract(cfg, flags, out);
    if (active == corpus_cmd) return cmd_build_corpus(cfg, flags, out);
    if (active == summarize_cmd) return cmd_summarize(cfg, flags, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kConfigError;
}

}  // namespace apisum::cli
