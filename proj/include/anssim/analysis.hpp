#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anssim/core_types.hpp"
#include "anssim/model_backend.hpp"

namespace anssim {

/// Product-moment correlation with compensated summation. nullopt when
/// n < 2 or either series is constant. Throws LengthMismatch.
std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y);

/// Tau-b with tie correction, O(n log n) (Knight's algorithm). nullopt when
/// n < 2 or every pair is tied in one of the series. Throws LengthMismatch.
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

enum class CorrelationSplit { F1Zero, F1Positive, All };

std::string_view to_string(CorrelationSplit split) noexcept;

inline constexpr std::string_view kHumanMetric = "human";

struct CorrelationCell {
  std::string metric_name;
  CorrelationSplit split = CorrelationSplit::All;
  std::optional<double> pearson_r;
  std::optional<double> kendall_tau_b;
  std::size_t n = 0;
};

/// Label and scores of one pair, stripped of its texts.
struct CorrelationRow {
  std::string pair_id;
  LexicalSplit split = LexicalSplit::F1Positive;
  double label = 0.0;
  /// First and second annotator labels, when recorded.
  std::optional<std::pair<double, double>> annotators;
  std::map<std::string, double> scores;
};

struct CorrelationReport {
  /// Row order: the human baseline (if any) followed by the metrics.
  std::vector<std::string> metrics;
  std::vector<CorrelationCell> cells;

  const CorrelationCell* find(std::string_view metric, CorrelationSplit split) const;
  /// Aligned table, r and tau per split, "-" for undefined cells.
  std::string to_text() const;
  /// Sorted keys, six-decimal floats, null for undefined cells.
  std::string to_json() const;
};

/// Joins pairs with their scores. Throws MissingLabels for a pair without a
/// majority label, MissingScores for a pair lacking one of `metrics` or
/// carrying an undefined value, UnknownPairId for scores of unknown pairs.
/// An empty `metrics` selects every metric present in `scores`.
std::vector<CorrelationRow> build_correlation_rows(std::span<const AnswerPair> pairs,
                                                   std::span<const MetricScore> scores,
                                                   std::vector<std::string>& metrics);

/// Pearson r and Kendall tau-b of every metric against the labels on the
/// F1 = 0, F1 > 0 and combined splits, plus an annotator-1 vs annotator-2
/// baseline row when annotator labels exist. Throws MissingScores.
CorrelationReport correlate(std::span<const CorrelationRow> rows, std::span<const std::string> metrics);

struct LayerPoint {
  int layer = 0;
  std::optional<double> pearson_r;
  std::size_t n = 0;
};

/// BERTScore F1 at each layer against the majority labels. Pairs are sent
/// to the backend in batches of `batch_size`. Throws MissingLabels.
std::vector<LayerPoint> layer_sweep(std::span<const AnswerPair> pairs, ModelBackend& backend,
                                    const std::string& model, std::span<const int> layers,
                                    std::size_t batch_size = 64);

std::string sweep_to_csv(std::span<const LayerPoint> points);

/// gnuplot script that plots the CSV written by sweep_to_csv to a PNG.
std::string sweep_gnuplot_script(const std::string& csv_path, const std::string& png_path,
                                 const std::string& title);

}  // namespace anssim
