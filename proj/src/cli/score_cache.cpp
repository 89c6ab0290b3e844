#include "anssim/cli/score_cache.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "anssim/error.hpp"
#include "anssim/hash.hpp"

namespace anssim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kScoresFile = "scores-v1.jsonl";
constexpr const char* kRosterFile = "roster-v1.json";

}  // namespace

ScoreCache::ScoreCache(std::string directory) : directory_(std::move(directory)) {
  if (directory_.empty()) return;
  std::ifstream scores(fs::path(directory_) / kScoresFile);
  std::string line;
  while (std::getline(scores, line)) {
    const json doc = json::parse(line, nullptr, false);
    // A torn trailing line from an interrupted run is skipped.
    if (!doc.is_object() || !doc.contains("key") || !doc.contains("value") || !doc["value"].is_number()) continue;
    entries_[doc["key"].get<std::string>()] = doc["value"].get<double>();
  }
  std::ifstream roster(fs::path(directory_) / kRosterFile);
  if (roster) {
    const json doc = json::parse(roster, nullptr, false);
    if (doc.is_array()) {
      for (const auto& e : doc) {
        ModelSpec spec;
        spec.alias = e.value("alias", std::string{});
        spec.hub_id = e.value("hub_id", std::string{});
        spec.kind = parse_model_kind(e.value("kind", std::string{})).value_or(ModelKind::TokenEncoder);
        spec.num_layers = e.value("num_layers", 0);
        spec.dim = e.value("dim", 0);
        spec.snapshot = e.value("snapshot", std::string{});
        if (!spec.alias.empty()) roster_[spec.alias] = spec;
      }
    }
  }
}

std::string ScoreCache::key(const std::string& metric, const std::string& snapshot_key, int layer,
                            const std::string& first, const std::string& second) {
  return metric + "|" + snapshot_key + "|" + std::to_string(layer) + "|" + hex64(fnv1a64(first)) +
         hex64(fnv1a64(second, fnv1a64(first) ^ 0x5bd1e995ULL));
}

std::optional<double> ScoreCache::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::put(const std::string& key, double value) {
  std::lock_guard lock(mutex_);
  if (entries_.insert_or_assign(key, value).second) pending_.emplace_back(key, value);
}

void ScoreCache::flush() {
  std::lock_guard lock(mutex_);
  if (directory_.empty()) {
    pending_.clear();
    return;
  }
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw Error(ErrorCode::ConfigError, "cannot create cache directory '" + directory_ + "': " + ec.message());

  if (!pending_.empty()) {
    std::ofstream out(fs::path(directory_) / kScoresFile, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write score cache in '" + directory_ + "'");
    for (const auto& [k, v] : pending_) out << json{{"key", k}, {"value", v}}.dump() << '\n';
    pending_.clear();
  }

  json roster = json::array();
  for (const auto& [alias, spec] : roster_) {
    roster.push_back({{"alias", spec.alias},
                      {"hub_id", spec.hub_id},
                      {"kind", std::string(to_string(spec.kind))},
                      {"num_layers", spec.num_layers},
                      {"dim", spec.dim},
                      {"snapshot", spec.snapshot}});
  }
  std::ofstream out(fs::path(directory_) / kRosterFile, std::ios::trunc | std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write roster cache in '" + directory_ + "'");
  out << roster.dump(2) << '\n';
}

std::optional<ModelSpec> ScoreCache::roster_entry(const std::string& alias) const {
  std::lock_guard lock(mutex_);
  const auto it = roster_.find(alias);
  if (it == roster_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::store_roster(const std::vector<ModelSpec>& roster) {
  std::lock_guard lock(mutex_);
  roster_.clear();
  for (const auto& spec : roster) roster_[spec.alias] = spec;
}

std::size_t ScoreCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

}  // namespace anssim::cli
