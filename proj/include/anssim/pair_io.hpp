#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anssim/core_types.hpp"

namespace anssim {

// Canonical pair records are JSON Lines objects:
//   {"id": str, "source": str, "first": str, "second": str,
//    "labels": [{"annotator": str, "label": int}], "majority": int|null}
// Writers add "split" ("F1_ZERO" / "F1_POSITIVE"). Readers recompute the split
// from the texts and reject a stored "split" that disagrees. Unknown fields
// are ignored. Every malformed line raises MalformedInput as
// "<origin>:<line>: <problem>".

std::string pair_to_jsonl(const AnswerPair& pair);
AnswerPair pair_from_jsonl(std::string_view line, std::string_view origin = "<input>", std::size_t line_no = 0);

std::vector<AnswerPair> read_pairs(std::istream& in, std::string_view origin = "<input>");
std::vector<AnswerPair> read_pairs_file(const std::string& path);
void write_pairs(std::ostream& out, std::span<const AnswerPair> pairs);
void write_pairs_file(const std::string& path, std::span<const AnswerPair> pairs);

// Score records: {"metric": str, "model": str|null, "pair_id": str, "value": float|null},
// keys sorted, floats at six decimals.

std::string score_to_jsonl(const MetricScore& score);
std::vector<MetricScore> read_scores(std::istream& in, std::string_view origin = "<input>");
std::vector<MetricScore> read_scores_file(const std::string& path);
void write_scores(std::ostream& out, std::span<const MetricScore> scores);

/// Label rows share the pair record layout; only "id" and "labels" are read.
struct LabelRow {
  std::string pair_id;
  std::vector<AnnotatorLabel> labels;
  std::size_t line = 0;
};

std::vector<LabelRow> read_label_rows(std::istream& in, std::string_view origin = "<input>");
std::vector<LabelRow> read_label_rows_file(const std::string& path);

}  // namespace anssim
