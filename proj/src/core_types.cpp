#include "anssim/core_types.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "anssim/error.hpp"

namespace anssim {

Answer::Answer(std::string text_, Span span_, std::optional<std::string> context)
    : text(std::move(text_)), span(span_), context_id(std::move(context)) {
  if (span_.start_char >= span_.end_char) {
    throw Error(ErrorCode::InvalidArgument,
                "answer span must satisfy start < end, got [" + std::to_string(span_.start_char) +
                    ", " + std::to_string(span_.end_char) + ")");
  }
}

SimilarityLabel::SimilarityLabel(int value) : value_(value) {
  if (value < 0 || value > 2) {
    throw Error(ErrorCode::InvalidArgument,
                "similarity label must be 0, 1 or 2, got " + std::to_string(value));
  }
}

std::string_view to_string(LexicalSplit split) noexcept {
  return split == LexicalSplit::F1Zero ? "F1_ZERO" : "F1_POSITIVE";
}

std::string_view to_string(Source source) noexcept {
  switch (source) {
    case Source::Squad: return "squad";
    case Source::GermanQuad: return "germanquad";
    case Source::NqOpen: return "nq-open";
    case Source::Other: return "other";
  }
  return "other";
}

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<Source> parse_source(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "squad") return Source::Squad;
  if (n == "germanquad") return Source::GermanQuad;
  if (n == "nq-open" || n == "nq_open" || n == "nqopen") return Source::NqOpen;
  if (n == "other") return Source::Other;
  return std::nullopt;
}

std::optional<LexicalSplit> parse_split(std::string_view name) {
  const std::string n = lower_ascii(name);
  if (n == "f1_zero") return LexicalSplit::F1Zero;
  if (n == "f1_positive") return LexicalSplit::F1Positive;
  return std::nullopt;
}

std::optional<SimilarityLabel> majority_vote(std::span<const SimilarityLabel> labels) {
  std::array<std::size_t, 3> counts{};
  for (const auto& label : labels) ++counts[static_cast<std::size_t>(label.value())];
  for (int v = 0; v < 3; ++v) {
    if (2 * counts[static_cast<std::size_t>(v)] > labels.size()) return SimilarityLabel(v);
  }
  return std::nullopt;
}

}  // namespace anssim
