#include "anssim/cli/config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "anssim/error.hpp"
#include "anssim/lexical_metrics.hpp"

namespace anssim::cli {

namespace {

const std::set<std::string>& scalar_keys() {
  static const std::set<std::string> keys{"backend_url",
                                          "lang",
                                          "metrics",
                                          "cache_dir",
                                          "jobs",
                                          "batch_size",
                                          "synonyms",
                                          "bertscore.vanilla_layer",
                                          "bertscore.trained_layer",
                                          "normalization.lowercase",
                                          "normalization.strip_punctuation",
                                          "normalization.remove_articles",
                                          "normalization.articles",
                                          "normalization.unicode_form"};
  return keys;
}

bool is_known_key(const std::string& key) {
  if (scalar_keys().count(key) > 0) return true;
  if (key.rfind("models.", 0) == 0) return is_semantic_metric(key.substr(7));
  return false;
}

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string lower = v;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  config_error(key + ": expected a boolean, got '" + v + "'");
}

long parse_int(const std::string& key, const std::string& v, long min) {
  try {
    std::size_t used = 0;
    const long n = std::stol(v, &used);
    if (used != v.size() || n < min) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    config_error(key + ": expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
  }
}

Language parse_language(const std::string& v) {
  if (v == "en" || v == "EN") return Language::En;
  if (v == "de" || v == "DE") return Language::De;
  config_error("lang: expected 'en' or 'de', got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& semantic_metric_names() {
  static const std::vector<std::string> names{"bertscore_vanilla", "bertscore_trained", "bi_encoder", "sas"};
  return names;
}

bool is_semantic_metric(const std::string& name) {
  const auto& names = semantic_metric_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

NormalizationProfile RunConfig::profile(Language lang) const {
  NormalizationProfile p = NormalizationProfile::for_language(lang);
  for (const auto& [field, value] : normalization) {
    const std::string key = "normalization." + field;
    if (field == "lowercase") {
      p.lowercase = parse_bool(key, value);
    } else if (field == "strip_punctuation") {
      p.strip_punctuation = parse_bool(key, value);
    } else if (field == "remove_articles") {
      p.remove_articles = parse_bool(key, value);
    } else if (field == "articles") {
      p.article_list = split_list(value);
    } else if (field == "unicode_form") {
      if (value == "NFC" || value == "nfc") {
        p.unicode_form = UnicodeForm::Nfc;
      } else if (value == "NFKC" || value == "nfkc") {
        p.unicode_form = UnicodeForm::Nfkc;
      } else {
        config_error(key + ": expected NFC or NFKC, got '" + value + "'");
      }
    }
  }
  return p;
}

std::vector<std::string> RunConfig::metrics_for(Language lang) const {
  if (!metrics.empty()) return metrics;
  std::vector<std::string> out = lexical_metric_names();
  if (lang == Language::De) std::erase(out, "meteor");
  return out;
}

std::string RunConfig::alias_for(const std::string& metric, Language lang) const {
  if (const auto it = model_aliases.find(metric); it != model_aliases.end()) return it->second;
  const std::string suffix = lang == Language::En ? "en" : "de";
  if (metric == "bertscore_vanilla") return "bertscore-vanilla-" + suffix;
  if (metric == "bertscore_trained") return "bertscore-trained";
  if (metric == "bi_encoder") return "bi-encoder";
  if (metric == "sas") return "sas-" + suffix;
  config_error("metric '" + metric + "' does not use a model");
}

bool RunConfig::needs_backend() const {
  return std::any_of(metrics.begin(), metrics.end(), [](const std::string& m) { return is_semantic_metric(m); });
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

ConfigLayer read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    config_error(path + ": " + e.what());
  }
  ConfigLayer layer;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string key = item.fullname();
    if (!is_known_key(key)) config_error(path + ": unknown setting '" + key + "'");
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i > 0) value += ',';
      value += item.inputs[i];
    }
    layer[key] = value;
  }
  return layer;
}

ConfigLayer read_env_layer(const EnvLookup& env) {
  ConfigLayer layer;
  std::vector<std::string> keys(scalar_keys().begin(), scalar_keys().end());
  for (const auto& m : semantic_metric_names()) keys.push_back("models." + m);
  for (const auto& key : keys) {
    std::string name = "ANSSIM_" + key;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
      return c == '.' ? '_' : static_cast<char>(std::toupper(c));
    });
    if (auto v = env(name)) layer[key] = *v;
  }
  return layer;
}

RunConfig resolve_config(const ConfigLayer& flags, const EnvLookup& env, const std::optional<std::string>& config_path) {
  ConfigLayer merged;
  std::optional<std::string> path = config_path;
  if (!path) path = env("ANSSIM_CONFIG");
  if (path && !path->empty()) merged = read_config_file(*path);
  for (const auto& [k, v] : read_env_layer(env)) merged[k] = v;
  for (const auto& [k, v] : flags) {
    if (!is_known_key(k)) config_error("unknown setting '" + k + "'");
    merged[k] = v;
  }

  RunConfig config;
  for (const auto& [key, value] : merged) {
    if (key == "backend_url") {
      config.backend_url = value;
    } else if (key == "lang") {
      config.language = parse_language(value);
    } else if (key == "metrics") {
      config.metrics = split_list(value);
    } else if (key == "cache_dir") {
      config.cache_dir = value;
    } else if (key == "jobs") {
      config.jobs = static_cast<std::size_t>(parse_int(key, value, 1));
    } else if (key == "batch_size") {
      config.batch_size = static_cast<std::size_t>(parse_int(key, value, 1));
    } else if (key == "synonyms") {
      config.synonyms_path = value;
    } else if (key == "bertscore.vanilla_layer") {
      config.vanilla_layer = static_cast<int>(parse_int(key, value, 0));
    } else if (key == "bertscore.trained_layer") {
      config.trained_layer = static_cast<int>(parse_int(key, value, 0));
    } else if (key.rfind("models.", 0) == 0) {
      config.model_aliases[key.substr(7)] = value;
    } else if (key.rfind("normalization.", 0) == 0) {
      config.normalization[key.substr(14)] = value;
    }
  }

  for (const auto& m : config.metrics) {
    if (!is_lexical_metric(m) && !is_semantic_metric(m)) config_error("unknown metric '" + m + "'");
  }
  if (config.language == Language::De &&
      std::find(config.metrics.begin(), config.metrics.end(), "meteor") != config.metrics.end()) {
    config_error("METEOR is not available for German");
  }
  // Surface bad normalization overrides now rather than mid-run.
  (void)config.profile(config.language.value_or(Language::En));
  if (config.needs_backend() && config.backend_url.empty()) {
    config_error("semantic metrics need a backend URL (--backend-url or ANSSIM_BACKEND_URL)");
  }
  return config;
}

}  // namespace anssim::cli
