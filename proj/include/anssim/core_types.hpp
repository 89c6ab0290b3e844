#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anssim {

/// Half-open character interval [start_char, end_char) into a context.
struct Span {
  std::size_t start_char = 0;
  std::size_t end_char = 0;

  bool overlaps(const Span& other) const noexcept {
    return std::max(start_char, other.start_char) < std::min(end_char, other.end_char);
  }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Answer {
  std::string text;
  std::optional<Span> span;
  std::optional<std::string> context_id;

  Answer() = default;
  explicit Answer(std::string text_) : text(std::move(text_)) {}
  /// Throws InvalidArgument unless start < end.
  Answer(std::string text_, Span span_, std::optional<std::string> context = std::nullopt);

  friend bool operator==(const Answer&, const Answer&) = default;
};

/// Ordinal similarity class: 0 dissimilar, 1 partially similar (one answer
/// less detailed), 2 same meaning.
class SimilarityLabel {
 public:
  /// Throws InvalidArgument for values outside {0, 1, 2}.
  explicit SimilarityLabel(int value);

  int value() const noexcept { return value_; }
  friend auto operator<=>(const SimilarityLabel&, const SimilarityLabel&) = default;

 private:
  int value_;
};

enum class LexicalSplit { F1Zero, F1Positive };
enum class Source { Squad, GermanQuad, NqOpen, Other };

std::string_view to_string(LexicalSplit split) noexcept;
std::string_view to_string(Source source) noexcept;
/// Accepts "squad", "germanquad", "nq-open"/"nq_open", "other" (case-insensitive).
std::optional<Source> parse_source(std::string_view name);
std::optional<LexicalSplit> parse_split(std::string_view name);

struct AnnotatorLabel {
  std::string annotator;
  SimilarityLabel label;

  friend bool operator==(const AnnotatorLabel&, const AnnotatorLabel&) = default;
};

struct AnswerPair {
  std::string id;
  Answer first;
  Answer second;
  std::vector<AnnotatorLabel> annotator_labels;
  std::optional<SimilarityLabel> majority_label;
  LexicalSplit lexical_split = LexicalSplit::F1Positive;
  Source source = Source::Other;

  friend bool operator==(const AnswerPair&, const AnswerPair&) = default;
};

/// A metric value attached to a pair. An absent value means UNDEFINED.
struct MetricScore {
  std::string metric_name;
  std::optional<double> value;
  std::string pair_id;
  std::string model;

  friend bool operator==(const MetricScore&, const MetricScore&) = default;
};

/// Label held by a strict majority of `labels`, or nullopt when there is no
/// strict majority (the caller then needs a tie-breaker). An empty list has no
/// majority either.
std::optional<SimilarityLabel> majority_vote(std::span<const SimilarityLabel> labels);

}  // namespace anssim
