#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "anssim/model_backend.hpp"

namespace anssim::cli {

/// Semantic scores keyed by (metric, model snapshot, layer, pair text hash),
/// persisted as JSON Lines under a cache directory. Lookups and inserts may
/// come from several workers; only flush() touches the disk.
///
/// The directory also remembers the backend roster so that a run whose
/// scores are all cached needs no backend at all.
class ScoreCache {
 public:
  /// An empty directory disables persistence (the cache still works in memory).
  explicit ScoreCache(std::string directory);

  static std::string key(const std::string& metric, const std::string& snapshot_key, int layer,
                         const std::string& first, const std::string& second);

  std::optional<double> get(const std::string& key) const;
  void put(const std::string& key, double value);
  /// Appends entries added since the last flush. Throws ConfigError on I/O failure.
  void flush();

  std::optional<ModelSpec> roster_entry(const std::string& alias) const;
  void store_roster(const std::vector<ModelSpec>& roster);

  std::size_t size() const;

 private:
  std::string directory_;
  mutable std::mutex mutex_;
  std::map<std::string, double> entries_;
  std::vector<std::pair<std::string, double>> pending_;
  std::map<std::string, ModelSpec> roster_;
};

}  // namespace anssim::cli
