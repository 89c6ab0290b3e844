#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anssim/core_types.hpp"
#include "anssim/pair_io.hpp"
#include "anssim/text_norm.hpp"

namespace anssim {

/// One question with all of its annotated answers.
struct QaRecord {
  std::string question_id;
  std::string question;
  std::vector<Answer> answers;
  std::optional<std::string> context_id;
};

enum class NqCorrectness { DefinitelyIncorrect = 0, PossiblyCorrect = 1, DefinitelyCorrect = 2 };

std::optional<NqCorrectness> parse_nq_correctness(std::string_view name);

struct NqOpenRecord {
  std::string question;
  std::vector<std::string> gold_answers;
  std::string prediction;
  NqCorrectness correctness = NqCorrectness::DefinitelyIncorrect;
};

inline SimilarityLabel to_label(NqCorrectness c) { return SimilarityLabel(static_cast<int>(c)); }

/// Reads the SQuAD v1/v2 JSON layout (data -> paragraphs -> qas -> answers).
/// Questions without answers are skipped. Spans are code point offsets.
std::vector<QaRecord> read_squad(std::istream& in, std::string_view origin = "<input>");
std::vector<QaRecord> read_squad_file(const std::string& path);

/// JSON Lines: {"question", "gold_answers": [str], "prediction", "correctness"}
/// where correctness is 0/1/2 or definitely_incorrect / possibly_correct /
/// definitely_correct.
std::vector<NqOpenRecord> read_nq_open(std::istream& in, std::string_view origin = "<input>");
std::vector<NqOpenRecord> read_nq_open_file(const std::string& path);

/// All unordered pairs of answers that differ after normalization, per
/// question, in annotation order. Ids are "<source>:<question_id>:<i>-<j>"
/// with i, j the answers' positions in the question.
std::vector<AnswerPair> extract_pairs(std::span<const QaRecord> records, Source source,
                                      const NormalizationProfile& profile);
std::vector<AnswerPair> extract_pairs(std::span<const QaRecord> records, Source source);

/// Attaches annotator labels. Rows for the same id accumulate, so tie-breaker
/// labels may come in a separate row. The first two labels decide when they
/// agree; otherwise the third label does.
/// Throws UnknownPairId, MissingLabels (fewer than two labels) or
/// MissingTieBreaker.
std::vector<AnswerPair> attach_labels(std::vector<AnswerPair> pairs, std::span<const LabelRow> rows);

/// Keeps records with exactly one gold answer; pair = (gold, prediction),
/// label from the correctness grade. Ids are "nq-open:<record index>".
std::vector<AnswerPair> ingest_nq_open(std::span<const NqOpenRecord> records);

/// RFC 4180 CSV (quoted fields, doubled quotes, embedded newlines).
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

/// Converts an exported annotation table into labeled pairs. Header names
/// (case-insensitive): answer1|first|gold_answer, answer2|second|prediction,
/// optional id, label1, label2, label3 (tie-breaker, may be blank) or a single
/// label|majority column.
std::vector<AnswerPair> convert_annotation_csv(std::istream& in, Source source, std::string_view origin = "<input>");
std::vector<AnswerPair> convert_annotation_csv_file(const std::string& path, Source source);

struct SplitCounts {
  std::size_t f1_zero = 0;
  std::size_t f1_positive = 0;
  std::size_t total() const noexcept { return f1_zero + f1_positive; }
};

SplitCounts count_splits(std::span<const AnswerPair> pairs);

}  // namespace anssim
