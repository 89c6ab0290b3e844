#include "anssim/pair_io.hpp"

#include <fstream>

#include <json.hpp>

#include "anssim/error.hpp"
#include "anssim/format.hpp"
#include "anssim/lexical_metrics.hpp"

namespace anssim {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(std::string_view origin, std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedInput, std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
}

json parse_line(std::string_view line, std::string_view origin, std::size_t line_no) {
  json doc = json::parse(line, nullptr, false);
  if (doc.is_discarded()) malformed(origin, line_no, "invalid JSON");
  if (!doc.is_object()) malformed(origin, line_no, "expected a JSON object");
  return doc;
}

std::string required_string(const json& doc, const char* key, std::string_view origin, std::size_t line_no) {
  if (!doc.contains(key) || !doc[key].is_string()) {
    malformed(origin, line_no, std::string("field \"") + key + "\" must be a string");
  }
  return doc[key].get<std::string>();
}

SimilarityLabel label_value(const json& v, std::string_view origin, std::size_t line_no) {
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 2) {
    malformed(origin, line_no, "label must be an integer in {0, 1, 2}");
  }
  return SimilarityLabel(v.get<int>());
}

std::vector<AnnotatorLabel> parse_labels(const json& doc, std::string_view origin, std::size_t line_no) {
  std::vector<AnnotatorLabel> out;
  if (!doc.contains("labels") || doc["labels"].is_null()) return out;
  if (!doc["labels"].is_array()) malformed(origin, line_no, "field \"labels\" must be a list");
  for (const auto& entry : doc["labels"]) {
    if (!entry.is_object() || !entry.contains("label")) {
      malformed(origin, line_no, "label entries need {\"annotator\", \"label\"}");
    }
    std::string annotator;
    if (entry.contains("annotator")) {
      if (entry["annotator"].is_string()) {
        annotator = entry["annotator"].get<std::string>();
      } else if (entry["annotator"].is_number_integer()) {
        annotator = std::to_string(entry["annotator"].get<long long>());
      } else {
        malformed(origin, line_no, "annotator must be a string");
      }
    }
    out.push_back(AnnotatorLabel{std::move(annotator), label_value(entry["label"], origin, line_no)});
  }
  return out;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, line_no);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedInput, path + ": cannot open file");
  return in;
}

}  // namespace

std::string pair_to_jsonl(const AnswerPair& pair) {
  std::string out = "{\"first\":" + json_quote(pair.first.text) + ",\"id\":" + json_quote(pair.id) + ",\"labels\":[";
  for (std::size_t i = 0; i < pair.annotator_labels.size(); ++i) {
    if (i > 0) out += ',';
    out += "{\"annotator\":" + json_quote(pair.annotator_labels[i].annotator) +
           ",\"label\":" + std::to_string(pair.annotator_labels[i].label.value()) + "}";
  }
  out += "],\"majority\":";
  out += pair.majority_label ? std::to_string(pair.majority_label->value()) : "null";
  out += ",\"second\":" + json_quote(pair.second.text);
  out += ",\"source\":" + json_quote(to_string(pair.source));
  out += ",\"split\":" + json_quote(to_string(pair.lexical_split)) + "}";
  return out;
}

AnswerPair pair_from_jsonl(std::string_view line, std::string_view origin, std::size_t line_no) {
  const json doc = parse_line(line, origin, line_no);
  AnswerPair pair;
  pair.id = required_string(doc, "id", origin, line_no);
  pair.first = Answer(required_string(doc, "first", origin, line_no));
  pair.second = Answer(required_string(doc, "second", origin, line_no));
  if (doc.contains("source") && !doc["source"].is_null()) {
    if (!doc["source"].is_string()) malformed(origin, line_no, "field \"source\" must be a string");
    const auto source = parse_source(doc["source"].get<std::string>());
    if (!source) malformed(origin, line_no, "unknown source '" + doc["source"].get<std::string>() + "'");
    pair.source = *source;
  }
  pair.annotator_labels = parse_labels(doc, origin, line_no);
  if (doc.contains("majority") && !doc["majority"].is_null()) {
    pair.majority_label = label_value(doc["majority"], origin, line_no);
  }

  if (pair.majority_label && !pair.annotator_labels.empty()) {
    std::vector<SimilarityLabel> values;
    for (const auto& l : pair.annotator_labels) values.push_back(l.label);
    const auto strict = majority_vote(values);
    if (strict && *strict != *pair.majority_label) {
      malformed(origin, line_no, "majority " + std::to_string(pair.majority_label->value()) +
                                     " contradicts the annotators' strict majority " +
                                     std::to_string(strict->value()));
    }
  }

  pair.lexical_split = lexical_split_of(pair.first.text, pair.second.text, profile_for(pair.source));
  if (doc.contains("split") && !doc["split"].is_null()) {
    const auto stored = doc["split"].is_string() ? parse_split(doc["split"].get<std::string>()) : std::nullopt;
    if (!stored) malformed(origin, line_no, "field \"split\" must be F1_ZERO or F1_POSITIVE");
    if (*stored != pair.lexical_split) {
      malformed(origin, line_no, "stored split " + std::string(to_string(*stored)) +
                                     " disagrees with recomputed " + std::string(to_string(pair.lexical_split)));
    }
  }
  return pair;
}

std::vector<AnswerPair> read_pairs(std::istream& in, std::string_view origin) {
  std::vector<AnswerPair> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    out.push_back(pair_from_jsonl(line, origin, line_no));
  });
  return out;
}

std::vector<AnswerPair> read_pairs_file(const std::string& path) {
  auto in = open_input(path);
  return read_pairs(in, path);
}

void write_pairs(std::ostream& out, std::span<const AnswerPair> pairs) {
  for (const auto& p : pairs) out << pair_to_jsonl(p) << '\n';
}

void write_pairs_file(const std::string& path, std::span<const AnswerPair> pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  write_pairs(out, pairs);
}

std::string score_to_jsonl(const MetricScore& score) {
  return "{\"metric\":" + json_quote(score.metric_name) +
         ",\"model\":" + (score.model.empty() ? std::string("null") : json_quote(score.model)) +
         ",\"pair_id\":" + json_quote(score.pair_id) + ",\"value\":" + format_json_number(score.value) + "}";
}

std::vector<MetricScore> read_scores(std::istream& in, std::string_view origin) {
  std::vector<MetricScore> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const json doc = parse_line(line, origin, line_no);
    MetricScore score;
    score.pair_id = required_string(doc, "pair_id", origin, line_no);
    score.metric_name = required_string(doc, "metric", origin, line_no);
    if (doc.contains("model") && doc["model"].is_string()) score.model = doc["model"].get<std::string>();
    if (!doc.contains("value")) malformed(origin, line_no, "field \"value\" is missing");
    if (!doc["value"].is_null()) {
      if (!doc["value"].is_number()) malformed(origin, line_no, "field \"value\" must be a number or null");
      const double v = doc["value"].get<double>();
      if (!(v >= 0.0 && v <= 1.0)) malformed(origin, line_no, "score value outside [0, 1]");
      score.value = v;
    }
    out.push_back(std::move(score));
  });
  return out;
}

std::vector<MetricScore> read_scores_file(const std::string& path) {
  auto in = open_input(path);
  return read_scores(in, path);
}

void write_scores(std::ostream& out, std::span<const MetricScore> scores) {
  for (const auto& s : scores) out << score_to_jsonl(s) << '\n';
}

std::vector<LabelRow> read_label_rows(std::istream& in, std::string_view origin) {
  std::vector<LabelRow> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const json doc = parse_line(line, origin, line_no);
    out.push_back(LabelRow{required_string(doc, "id", origin, line_no), parse_labels(doc, origin, line_no), line_no});
  });
  return out;
}

std::vector<LabelRow> read_label_rows_file(const std::string& path) {
  auto in = open_input(path);
  return read_label_rows(in, path);
}

}  // namespace anssim
