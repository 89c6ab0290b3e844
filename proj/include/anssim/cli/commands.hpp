#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "anssim/cli/config.hpp"
#include "anssim/cli/score_cache.hpp"
#include "anssim/core_types.hpp"
#include "anssim/error.hpp"
#include "anssim/model_backend.hpp"

namespace anssim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitBackendUnreachable = 3,
  kExitMalformedInput = 4,
};

int exit_code_for(ErrorCode code) noexcept;

struct ScoreStats {
  std::size_t cache_hits = 0;
  std::size_t computed = 0;
  std::size_t backend_batches = 0;
  std::size_t roster_queries = 0;
  std::size_t empty_tokenizations = 0;
};

/// Language used for lexical metrics: the configured one, or German when
/// every pair comes from GermanQuAD, else English.
Language resolve_language(const RunConfig& config, std::span<const AnswerPair> pairs);

/// One score per (pair, metric), pairs in input order and metrics in config
/// order. Semantic metrics consult `cache` first and only query `backend`
/// (which may be null for lexical-only runs) for misses, in batches spread
/// over config.jobs workers.
std::vector<MetricScore> score_pairs(std::span<const AnswerPair> pairs, const RunConfig& config,
                                     ModelBackend* backend, ScoreCache& cache, ScoreStats* stats = nullptr);

/// Parses "0..12", "0,2,4", "1..3,7" or "all" (0..num_layers).
std::vector<int> parse_layers(const std::string& text, int num_layers);

/// Entry point of the `anssim` tool. Diagnostics go to `err`, reports to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env);

}  // namespace anssim::cli
