#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anssim/text_norm.hpp"

namespace anssim::cli {

/// Semantic metric names understood by `score`.
const std::vector<std::string>& semantic_metric_names();
bool is_semantic_metric(const std::string& name);

struct RunConfig {
  std::string backend_url;
  /// Unset means "infer from the pairs' sources".
  std::optional<Language> language;
  std::vector<std::string> metrics;
  /// metric -> model alias, for semantic metrics.
  std::map<std::string, std::string> model_aliases;
  /// Explicit normalization overrides; applied on top of the language profile.
  std::map<std::string, std::string> normalization;
  std::string cache_dir;
  std::size_t jobs = 4;
  std::size_t batch_size = 32;
  std::string synonyms_path;
  int vanilla_layer = 2;
  /// Unset means the model's last layer.
  std::optional<int> trained_layer;

  NormalizationProfile profile(Language lang) const;
  std::vector<std::string> metrics_for(Language lang) const;
  std::string alias_for(const std::string& metric, Language lang) const;
  bool needs_backend() const;
};

/// Flat key/value view of one configuration layer. Keys are the config-file
/// names: backend_url, lang, metrics, cache_dir, jobs, batch_size, synonyms,
/// models.<metric>, normalization.<field>, bertscore.vanilla_layer,
/// bertscore.trained_layer.
using ConfigLayer = std::map<std::string, std::string>;

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// Reads a TOML config file into a flat layer. Lists are joined with commas.
/// Throws ConfigError for unreadable files or unknown keys.
ConfigLayer read_config_file(const std::string& path);

/// ANSSIM_<KEY> with dots mapped to underscores, e.g. ANSSIM_MODELS_SAS.
ConfigLayer read_env_layer(const EnvLookup& env);

/// Merges flags > env > config file > defaults and validates the result.
/// Throws ConfigError.
RunConfig resolve_config(const ConfigLayer& flags, const EnvLookup& env, const std::optional<std::string>& config_path);

}  // namespace anssim::cli
