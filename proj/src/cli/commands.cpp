#include "anssim/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "anssim/analysis.hpp"
#include "anssim/dataset_pipeline.hpp"
#include "anssim/error.hpp"
#include "anssim/lexical_metrics.hpp"
#include "anssim/pair_io.hpp"
#include "anssim/semantic_metrics.hpp"

namespace anssim::cli {

namespace {

ModelKind kind_for(const std::string& metric) {
  if (metric == "bi_encoder") return ModelKind::SentenceEncoder;
  if (metric == "sas") return ModelKind::CrossEncoder;
  return ModelKind::TokenEncoder;
}

int layer_for(const std::string& metric, const RunConfig& config, const ModelSpec& spec) {
  if (metric == "bertscore_vanilla") return config.vanilla_layer;
  if (metric == "bertscore_trained") return config.trained_layer.value_or(spec.num_layers);
  return -1;
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

class RosterView {
 public:
  RosterView(ModelBackend* backend, ScoreCache& cache, ScoreStats& stats)
      : backend_(backend), cache_(cache), stats_(stats) {}

  ModelSpec lookup(const std::string& alias) {
    if (!fetched_) {
      if (auto cached = cache_.roster_entry(alias)) return *cached;
    }
    return fresh(alias);
  }

  ModelSpec fresh(const std::string& alias) {
    if (!fetched_) {
      if (backend_ == nullptr) throw Error(ErrorCode::ConfigError, "semantic metrics need a backend");
      cache_.store_roster(backend_->models());
      ++stats_.roster_queries;
      fetched_ = true;
    }
    if (auto spec = cache_.roster_entry(alias)) return *spec;
    throw Error(ErrorCode::UnknownModel, "backend has no model '" + alias + "'");
  }

  bool fetched() const { return fetched_; }

 private:
  ModelBackend* backend_;
  ScoreCache& cache_;
  ScoreStats& stats_;
  bool fetched_ = false;
};

std::vector<double> score_semantic(const std::string& metric, std::span<const AnswerPair> pairs,
                                   const std::vector<std::size_t>& todo, const RunConfig& config, const ModelSpec& spec,
                                   ModelBackend& backend, ScoreStats& stats) {
  if (spec.kind != kind_for(metric)) {
    throw Error(ErrorCode::ConfigError, "model '" + spec.alias + "' for metric '" + metric + "' is a " +
                                            std::string(to_string(spec.kind)) + ", expected " +
                                            std::string(to_string(kind_for(metric))));
  }
  const std::size_t batch = config.batch_size;
  const std::size_t batches = (todo.size() + batch - 1) / batch;
  std::vector<double> values(todo.size(), 0.0);
  std::atomic<std::size_t> empty{0};
  const int layer = layer_for(metric, config, spec);

  parallel_for(batches, config.jobs, [&](std::size_t b) {
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(todo.size(), lo + batch);
    std::vector<TextPair> texts;
    for (std::size_t k = lo; k < hi; ++k) texts.emplace_back(pairs[todo[k]].first.text, pairs[todo[k]].second.text);
    if (metric == "sas") {
      const auto v = sas_batch(texts, backend, spec.alias);
      std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(lo));
    } else if (metric == "bi_encoder") {
      const auto v = bi_encoder_batch(texts, backend, spec.alias);
      std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(lo));
    } else {
      const int layers[] = {layer};
      const auto v = bertscore_batch(texts, backend, spec.alias, layers);
      for (std::size_t k = 0; k < v.size(); ++k) {
        values[lo + k] = v[k].front().f1;
        if (v[k].front().empty_tokenization) ++empty;
      }
    }
  });
  stats.backend_batches += batches;
  stats.empty_tokenizations += empty;
  return values;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Options shared by the subcommands that resolve a RunConfig.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> backend_url;
  std::optional<std::string> lang;
  std::optional<std::string> metrics;
  std::optional<std::string> cache_dir;
  std::optional<std::string> jobs;
  std::optional<std::string> batch_size;
  std::optional<std::string> synonyms;
  std::vector<std::string> model_aliases;

  void attach(CLI::App& app, bool with_metrics) {
    app.add_option("--config", config_path, "TOML config file (also ANSSIM_CONFIG)");
    app.add_option("--backend-url", backend_url, "inference sidecar URL, or 'synthetic'");
    app.add_option("--lang", lang, "normalization profile")->check(CLI::IsMember({"en", "de"}));
    app.add_option("--cache-dir", cache_dir, "directory for cached semantic scores");
    app.add_option("--jobs", jobs, "parallel backend requests");
    app.add_option("--batch-size", batch_size, "pairs per backend request");
    app.add_option("--model-alias", model_aliases, "metric=alias override (repeatable)");
    if (with_metrics) {
      app.add_option("--metrics", metrics, "comma-separated metric names");
      app.add_option("--synonyms", synonyms, "METEOR synonym lexicon (tab-separated)");
    }
  }

  RunConfig resolve(const EnvLookup& env) const {
    ConfigLayer flags;
    auto set = [&](const char* key, const std::optional<std::string>& v) {
      if (v) flags[key] = *v;
    };
    set("backend_url", backend_url);
    set("lang", lang);
    set("metrics", metrics);
    set("cache_dir", cache_dir);
    set("jobs", jobs);
    set("batch_size", batch_size);
    set("synonyms", synonyms);
    for (const auto& entry : model_aliases) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--model-alias expects metric=alias");
      flags["models." + entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return resolve_config(flags, env, config_path);
  }
};

int cmd_pairs(const std::string& source_name, const std::string& input, const std::string& labels,
              const std::string& out_path, std::ostream& out) {
  const auto source = parse_source(source_name);
  if (!source) throw Error(ErrorCode::ConfigError, "unknown source '" + source_name + "'");

  std::vector<AnswerPair> pairs;
  if (ends_with(input, ".csv")) {
    pairs = convert_annotation_csv_file(input, *source);
  } else if (*source == Source::NqOpen) {
    pairs = ingest_nq_open(read_nq_open_file(input));
  } else {
    pairs = extract_pairs(read_squad_file(input), *source);
  }
  if (!labels.empty()) pairs = attach_labels(std::move(pairs), read_label_rows_file(labels));
  write_pairs_file(out_path, pairs);

  const SplitCounts counts = count_splits(pairs);
  const auto labeled = std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.majority_label.has_value(); });
  out << to_string(*source) << ": " << counts.total() << " pairs (" << counts.f1_zero << " F1=0, " << counts.f1_positive
      << " F1>0), " << labeled << " labeled -> " << out_path << '\n';
  return kExitOk;
}

int cmd_score(const RunConfig& config, const std::string& pairs_path, const std::string& out_path, bool refresh,
              std::ostream& out, std::ostream& err) {
  const auto pairs = read_pairs_file(pairs_path);
  std::unique_ptr<ModelBackend> backend;
  if (config.needs_backend()) backend = make_backend(config.backend_url);
  ScoreCache cache(config.cache_dir);
  if (refresh && backend) cache.store_roster(backend->models());
  ScoreStats stats;
  const auto scores = score_pairs(pairs, config, backend.get(), cache, &stats);
  cache.flush();

  if (out_path.empty() || out_path == "-") {
    write_scores(out, scores);
  } else {
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::ConfigError, "cannot write '" + out_path + "'");
    write_scores(file, scores);
  }
  err << "scored " << pairs.size() << " pairs x " << config.metrics_for(resolve_language(config, pairs)).size()
      << " metrics (" << stats.cache_hits << " cached, " << stats.computed << " computed, " << stats.backend_batches
      << " backend batches)\n";
  if (stats.empty_tokenizations > 0) {
    err << "warning: " << stats.empty_tokenizations << " pair(s) tokenized to nothing; BERTScore set to 0\n";
  }
  return kExitOk;
}

int cmd_correlate(const std::string& pairs_path, const std::string& scores_path, const std::string& out_path,
                  const std::optional<std::string>& metrics_csv, std::ostream& out) {
  const auto pairs = read_pairs_file(pairs_path);
  const auto scores = read_scores_file(scores_path);
  std::vector<std::string> metrics;
  if (metrics_csv) {
    std::stringstream s(*metrics_csv);
    std::string m;
    while (std::getline(s, m, ',')) {
      if (!m.empty()) metrics.push_back(m);
    }
  }
  const auto rows = build_correlation_rows(pairs, scores, metrics);
  const CorrelationReport report = correlate(rows, metrics);
  const std::string text = report.to_text();
  out << text;
  if (!out_path.empty()) write_text(out_path, ends_with(out_path, ".json") ? report.to_json() + "\n" : text);
  return kExitOk;
}

int cmd_layer_sweep(const RunConfig& config, const std::string& pairs_path, const std::string& model,
                    const std::string& layers_text, const std::string& out_path, const std::string& plot_path,
                    std::ostream& out) {
  if (config.backend_url.empty()) throw Error(ErrorCode::ConfigError, "layer-sweep needs a backend URL");
  const auto pairs = read_pairs_file(pairs_path);
  auto backend = make_backend(config.backend_url);
  const ModelSpec spec = backend->model(model);
  const auto layers = parse_layers(layers_text, spec.num_layers);
  const auto points = layer_sweep(pairs, *backend, model, layers, config.batch_size);
  const std::string csv = sweep_to_csv(points);
  out << csv;
  if (!out_path.empty()) write_text(out_path, csv);
  if (!plot_path.empty()) {
    if (out_path.empty()) throw Error(ErrorCode::ConfigError, "--plot needs --out for the data file");
    const std::string png = ends_with(plot_path, ".gp") ? plot_path.substr(0, plot_path.size() - 3) + ".png"
                                                         : plot_path + ".png";
    write_text(plot_path, sweep_gnuplot_script(out_path, png, "BERTScore layer sweep: " + model));
  }
  return kExitOk;
}

int cmd_check_backend(const RunConfig& config, std::ostream& out) {
  if (config.backend_url.empty()) throw Error(ErrorCode::ConfigError, "no backend URL configured");
  auto backend = make_backend(config.backend_url);
  const Language lang = config.language.value_or(Language::En);

  std::vector<std::string> metrics;
  for (const auto& m : config.metrics) {
    if (is_semantic_metric(m)) metrics.push_back(m);
  }
  if (metrics.empty()) metrics = semantic_metric_names();

  const auto roster = backend->models();
  out << "backend " << config.backend_url << ": " << roster.size() << " model(s)\n";
  bool healthy = true;
  for (const auto& metric : metrics) {
    const std::string alias = config.alias_for(metric, lang);
    const ModelKind expected = kind_for(metric);
    std::string problem;
    std::string detail;
    const auto it = std::find_if(roster.begin(), roster.end(), [&](const ModelSpec& s) { return s.alias == alias; });
    if (it == roster.end()) {
      problem = "model not in roster";
    } else if (it->kind != expected) {
      problem = "kind is " + std::string(to_string(it->kind)) + ", expected " + std::string(to_string(expected));
    } else {
      detail = std::string(to_string(it->kind)) + " layers=" + std::to_string(it->num_layers) +
               " dim=" + std::to_string(it->dim);
      try {
        if (expected == ModelKind::TokenEncoder) {
          const int layer = layer_for(metric, config, *it);
          if (layer < 0 || layer > it->num_layers) {
            problem = "layer " + std::to_string(layer) + " outside [0, " + std::to_string(it->num_layers) + "]";
          } else {
            const std::string text = "ultraviolet";
            const int layers[] = {layer};
            const auto r = backend->embed_tokens(std::span(&text, 1), alias, layers);
            if (r.size() != 1 || r[0].tokens.empty() || !r[0].layers.count(layer) ||
                r[0].layers.at(layer).rows() != r[0].tokens.size()) {
              problem = "embed_tokens returned a malformed result";
            } else if (it->dim > 0 && r[0].layers.at(layer).dim() != static_cast<std::size_t>(it->dim)) {
              problem = "embedding dimension differs from roster";
            }
          }
        } else if (expected == ModelKind::SentenceEncoder) {
          const std::vector<std::string> texts{"UV", "ultraviolet"};
          const auto v = backend->embed_sentence(texts, alias);
          if (v.size() != 2 || v[0].vector.empty() || v[0].vector.size() != v[1].vector.size()) {
            problem = "embed_sentence returned a malformed result";
          }
        } else {
          const TextPair pair{"UV", "ultraviolet"};
          const auto s = backend->cross_score(std::span(&pair, 1), alias);
          if (s.size() != 1 || !std::isfinite(s[0])) problem = "cross_score returned a malformed result";
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BackendUnreachable) throw;
        problem = e.what();
      }
    }
    healthy = healthy && problem.empty();
    out << (problem.empty() ? "ok   " : "FAIL ") << metric << " -> " << alias << "  "
        << (problem.empty() ? detail : problem) << '\n';
  }
  return healthy ? kExitOk : kExitFailure;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnsupportedLanguage:
    case ErrorCode::UnknownModel:
    case ErrorCode::LayerOutOfRange:
      return kExitConfig;
    case ErrorCode::BackendUnreachable:
      return kExitBackendUnreachable;
    case ErrorCode::MalformedInput:
    case ErrorCode::UnknownPairId:
    case ErrorCode::MissingTieBreaker:
    case ErrorCode::MissingLabels:
    case ErrorCode::MissingScores:
    case ErrorCode::LengthMismatch:
      return kExitMalformedInput;
    default:
      return kExitFailure;
  }
}

Language resolve_language(const RunConfig& config, std::span<const AnswerPair> pairs) {
  if (config.language) return *config.language;
  const bool german = !pairs.empty() && std::all_of(pairs.begin(), pairs.end(), [](const AnswerPair& p) {
    return p.source == Source::GermanQuad;
  });
  return german ? Language::De : Language::En;
}

std::vector<MetricScore> score_pairs(std::span<const AnswerPair> pairs, const RunConfig& config,
                                     ModelBackend* backend, ScoreCache& cache, ScoreStats* stats_out) {
  ScoreStats stats;
  const Language lang = resolve_language(config, pairs);
  const NormalizationProfile profile = config.profile(lang);
  const std::vector<std::string> metrics = config.metrics_for(lang);

  MeteorParams meteor_params;
  if (!config.synonyms_path.empty()) {
    meteor_params.synonyms = std::make_shared<SynonymLexicon>(SynonymLexicon::load(config.synonyms_path, profile));
  }

  // values[m][i] is metric m on pair i.
  std::vector<std::vector<double>> values(metrics.size(), std::vector<double>(pairs.size(), 0.0));
  std::vector<std::string> models(metrics.size());
  RosterView roster(backend, cache, stats);

  for (std::size_t m = 0; m < metrics.size(); ++m) {
    const std::string& metric = metrics[m];
    if (is_lexical_metric(metric)) {
      const PairMetric fn = lexical_metric(metric, profile, meteor_params);
      for (std::size_t i = 0; i < pairs.size(); ++i) values[m][i] = fn(pairs[i].first.text, pairs[i].second.text);
      continue;
    }

    const std::string alias = config.alias_for(metric, lang);
    models[m] = alias;
    ModelSpec spec = roster.lookup(alias);
    auto keys_and_misses = [&](const ModelSpec& s) {
      std::vector<std::string> keys;
      std::vector<std::size_t> misses;
      const int layer = layer_for(metric, config, s);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        keys.push_back(ScoreCache::key(metric, s.snapshot_key(), layer, pairs[i].first.text, pairs[i].second.text));
        if (!cache.get(keys.back())) misses.push_back(i);
      }
      return std::make_pair(keys, misses);
    };
    auto [keys, misses] = keys_and_misses(spec);
    if (!misses.empty() && !roster.fetched()) {
      // About to hit the backend anyway: make sure the snapshot is current.
      spec = roster.fresh(alias);
      std::tie(keys, misses) = keys_and_misses(spec);
    }
    if (!misses.empty()) {
      if (backend == nullptr) throw Error(ErrorCode::ConfigError, "metric '" + metric + "' needs a backend");
      const auto computed = score_semantic(metric, pairs, misses, config, spec, *backend, stats);
      for (std::size_t k = 0; k < misses.size(); ++k) cache.put(keys[misses[k]], computed[k]);
      stats.computed += misses.size();
    }
    stats.cache_hits += pairs.size() - misses.size();
    for (std::size_t i = 0; i < pairs.size(); ++i) values[m][i] = cache.get(keys[i]).value_or(0.0);
  }

  std::vector<MetricScore> out;
  out.reserve(pairs.size() * metrics.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      out.push_back(MetricScore{metrics[m], values[m][i], pairs[i].id, models[m]});
    }
  }
  if (stats_out) *stats_out = stats;
  return out;
}

std::vector<int> parse_layers(const std::string& text, int num_layers) {
  std::vector<int> layers;
  if (text == "all") {
    for (int l = 0; l <= num_layers; ++l) layers.push_back(l);
    return layers;
  }
  auto to_int = [&](const std::string& s) {
    if (s == "L" || s == "last") return num_layers;
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::ConfigError, "bad layer '" + s + "' in '" + text + "'");
  };
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      layers.push_back(to_int(part));
      continue;
    }
    const int lo = to_int(part.substr(0, dots));
    const int hi = to_int(part.substr(dots + 2));
    if (lo > hi) throw Error(ErrorCode::ConfigError, "empty layer range '" + part + "'");
    for (int l = lo; l <= hi; ++l) layers.push_back(l);
  }
  if (layers.empty()) throw Error(ErrorCode::ConfigError, "no layers given");
  return layers;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Lexical and semantic similarity metrics for QA answer pairs", "anssim"};
  app.require_subcommand(1);

  std::string source;
  std::string input;
  std::string labels;
  std::string pairs_path;
  std::string scores_path;
  std::string out_path;
  std::string model;
  std::string layers = "all";
  std::string plot_path;
  std::optional<std::string> correlate_metrics;
  bool refresh_roster = false;

  auto* pairs_cmd = app.add_subcommand("pairs", "build labeled answer pairs from a QA corpus");
  pairs_cmd->add_option("--source", source, "squad, germanquad or nq-open")->required();
  pairs_cmd->add_option("--input", input, "SQuAD JSON, NQ-open JSONL or annotation CSV")->required();
  pairs_cmd->add_option("--labels", labels, "annotator labels (JSONL)");
  pairs_cmd->add_option("--out", out_path, "output pairs JSONL")->required();

  CommonOptions score_opts;
  auto* score_cmd = app.add_subcommand("score", "score pairs with lexical and semantic metrics");
  score_cmd->add_option("--pairs", pairs_path, "pairs JSONL")->required();
  score_cmd->add_option("--out", out_path, "scores JSONL (default stdout)");
  score_cmd->add_flag("--refresh-roster", refresh_roster, "query the backend roster even if cached");
  score_opts.attach(*score_cmd, true);

  auto* correlate_cmd = app.add_subcommand("correlate", "correlate metric scores with human labels");
  correlate_cmd->add_option("--pairs", pairs_path, "labeled pairs JSONL")->required();
  correlate_cmd->add_option("--scores", scores_path, "scores JSONL")->required();
  correlate_cmd->add_option("--out", out_path, "report path (.json for JSON, anything else for text)");
  correlate_cmd->add_option("--metrics", correlate_metrics, "comma-separated subset of metrics");

  CommonOptions sweep_opts;
  auto* sweep_cmd = app.add_subcommand("layer-sweep", "BERTScore correlation per model layer");
  sweep_cmd->add_option("--pairs", pairs_path, "labeled pairs JSONL")->required();
  sweep_cmd->add_option("--model", model, "token encoder alias")->required();
  sweep_cmd->add_option("--layers", layers, "e.g. 0..12, 0,2,4 or all");
  sweep_cmd->add_option("--out", out_path, "CSV output");
  sweep_cmd->add_option("--plot", plot_path, "gnuplot script to write");
  sweep_opts.attach(*sweep_cmd, false);

  CommonOptions check_opts;
  auto* check_cmd = app.add_subcommand("check-backend", "verify the inference sidecar's roster");
  check_opts.attach(*check_cmd, true);

  std::vector<const char*> argv{"anssim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*pairs_cmd) return cmd_pairs(source, input, labels, out_path, out);
    if (*score_cmd) return cmd_score(score_opts.resolve(env), pairs_path, out_path, refresh_roster, out, err);
    if (*correlate_cmd) return cmd_correlate(pairs_path, scores_path, out_path, correlate_metrics, out);
    if (*sweep_cmd) return cmd_layer_sweep(sweep_opts.resolve(env), pairs_path, model, layers, out_path, plot_path, out);
    if (*check_cmd) return cmd_check_backend(check_opts.resolve(env), out);
  } catch (const Error& e) {
    err << "anssim: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "anssim: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace anssim::cli
