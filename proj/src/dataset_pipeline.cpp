#include "anssim/dataset_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "anssim/error.hpp"
#include "anssim/lexical_metrics.hpp"

namespace anssim {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(std::string_view origin, std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::MalformedInput, std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedInput, path + ": cannot open file");
  return in;
}

std::size_t code_point_length(std::string_view utf8) {
  return static_cast<std::size_t>(
      std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// First two labels decide when they agree, otherwise the third breaks the tie.
SimilarityLabel resolve_majority(const std::vector<AnnotatorLabel>& labels, const std::string& pair_id) {
  if (labels.size() < 2) {
    throw Error(ErrorCode::MissingLabels,
                "pair '" + pair_id + "' has " + std::to_string(labels.size()) + " annotator label(s), need 2");
  }
  if (labels[0].label == labels[1].label) return labels[0].label;
  if (labels.size() < 3) {
    throw Error(ErrorCode::MissingTieBreaker, "annotators disagree on pair '" + pair_id + "' and no tie-breaker label");
  }
  if (labels.size() > 3) {
    throw Error(ErrorCode::MalformedInput,
                "pair '" + pair_id + "' has annotator disagreement and more than three labels");
  }
  return labels[2].label;
}

}  // namespace

std::optional<NqCorrectness> parse_nq_correctness(std::string_view name) {
  std::string n = lower_ascii(std::string(name));
  std::replace(n.begin(), n.end(), '-', '_');
  std::replace(n.begin(), n.end(), ' ', '_');
  if (n == "0" || n == "def_incorrect" || n == "definitely_incorrect") return NqCorrectness::DefinitelyIncorrect;
  if (n == "1" || n == "possibly_correct") return NqCorrectness::PossiblyCorrect;
  if (n == "2" || n == "def_correct" || n == "definitely_correct") return NqCorrectness::DefinitelyCorrect;
  return std::nullopt;
}

std::vector<QaRecord> read_squad(std::istream& in, std::string_view origin) {
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) malformed(origin, 1, "invalid JSON");
  if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
    malformed(origin, 1, "expected a SQuAD document with a \"data\" list");
  }
  std::vector<QaRecord> out;
  std::size_t article_index = 0;
  for (const auto& article : doc["data"]) {
    const std::string title = article.value("title", "article" + std::to_string(article_index));
    std::size_t paragraph_index = 0;
    for (const auto& paragraph : article.value("paragraphs", json::array())) {
      const std::string context_id = title + "#" + std::to_string(paragraph_index++);
      for (const auto& qa : paragraph.value("qas", json::array())) {
        QaRecord record;
        if (!qa.contains("id")) malformed(origin, 1, "question in '" + context_id + "' has no id");
        record.question_id = qa["id"].is_string() ? qa["id"].get<std::string>() : qa["id"].dump();
        record.question = qa.value("question", std::string{});
        record.context_id = context_id;
        for (const auto& a : qa.value("answers", json::array())) {
          if (!a.contains("text") || !a["text"].is_string()) {
            malformed(origin, 1, "answer of question '" + record.question_id + "' has no text");
          }
          std::string text = a["text"].get<std::string>();
          const std::size_t length = code_point_length(text);
          if (a.contains("answer_start") && a["answer_start"].is_number_integer() &&
              a["answer_start"].get<long long>() >= 0 && length > 0) {
            const auto start = a["answer_start"].get<std::size_t>();
            record.answers.emplace_back(std::move(text), Span{start, start + length}, context_id);
          } else {
            Answer answer(std::move(text));
            answer.context_id = context_id;
            record.answers.push_back(std::move(answer));
          }
        }
        if (!record.answers.empty()) out.push_back(std::move(record));
      }
    }
    ++article_index;
  }
  return out;
}

std::vector<QaRecord> read_squad_file(const std::string& path) {
  auto in = open_input(path);
  return read_squad(in, path);
}

std::vector<NqOpenRecord> read_nq_open(std::istream& in, std::string_view origin) {
  std::vector<NqOpenRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) malformed(origin, line_no, "expected a JSON object");
    NqOpenRecord record;
    record.question = doc.value("question", std::string{});
    const char* gold_key = doc.contains("gold_answers") ? "gold_answers" : "answer";
    if (!doc.contains(gold_key) || !doc[gold_key].is_array()) {
      malformed(origin, line_no, "field \"gold_answers\" must be a list of strings");
    }
    for (const auto& g : doc[gold_key]) {
      if (!g.is_string()) malformed(origin, line_no, "gold answers must be strings");
      record.gold_answers.push_back(g.get<std::string>());
    }
    if (!doc.contains("prediction") || !doc["prediction"].is_string()) {
      malformed(origin, line_no, "field \"prediction\" must be a string");
    }
    record.prediction = doc["prediction"].get<std::string>();
    const char* grade_key = doc.contains("correctness") ? "correctness" : "label";
    if (!doc.contains(grade_key)) malformed(origin, line_no, "field \"correctness\" is missing");
    const json& grade = doc[grade_key];
    const std::string grade_text = grade.is_string() ? grade.get<std::string>() : grade.dump();
    const auto correctness = parse_nq_correctness(grade_text);
    if (!correctness) malformed(origin, line_no, "unknown correctness grade " + grade_text);
    record.correctness = *correctness;
    out.push_back(std::move(record));
  }
  return out;
}

std::vector<NqOpenRecord> read_nq_open_file(const std::string& path) {
  auto in = open_input(path);
  return read_nq_open(in, path);
}

std::vector<AnswerPair> extract_pairs(std::span<const QaRecord> records, Source source,
                                      const NormalizationProfile& profile) {
  std::vector<AnswerPair> out;
  std::unordered_map<std::string, std::size_t> seen_questions;
  for (const auto& record : records) {
    std::string question_key = record.question_id;
    if (const std::size_t repeat = seen_questions[record.question_id]++; repeat > 0) {
      question_key += "#" + std::to_string(repeat);
    }

    std::vector<std::size_t> distinct;
    std::set<std::string> normalized_seen;
    for (std::size_t i = 0; i < record.answers.size(); ++i) {
      if (normalized_seen.insert(normalize(record.answers[i].text, profile)).second) distinct.push_back(i);
    }
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      for (std::size_t b = a + 1; b < distinct.size(); ++b) {
        AnswerPair pair;
        pair.id = std::string(to_string(source)) + ":" + question_key + ":" + std::to_string(distinct[a]) + "-" +
                  std::to_string(distinct[b]);
        pair.first = record.answers[distinct[a]];
        pair.second = record.answers[distinct[b]];
        pair.source = source;
        pair.lexical_split = lexical_split_of(pair.first.text, pair.second.text, profile);
        out.push_back(std::move(pair));
      }
    }
  }
  return out;
}

std::vector<AnswerPair> extract_pairs(std::span<const QaRecord> records, Source source) {
  return extract_pairs(records, source, profile_for(source));
}

std::vector<AnswerPair> attach_labels(std::vector<AnswerPair> pairs, std::span<const LabelRow> rows) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pairs.size(); ++i) index.emplace(pairs[i].id, i);

  std::set<std::size_t> touched;
  for (const auto& row : rows) {
    const auto it = index.find(row.pair_id);
    if (it == index.end()) {
      throw Error(ErrorCode::UnknownPairId,
                  "label row at line " + std::to_string(row.line) + " references unknown pair '" + row.pair_id + "'");
    }
    auto& labels = pairs[it->second].annotator_labels;
    labels.insert(labels.end(), row.labels.begin(), row.labels.end());
    touched.insert(it->second);
  }
  for (const std::size_t i : touched) pairs[i].majority_label = resolve_majority(pairs[i].annotator_labels, pairs[i].id);
  return pairs;
}

std::vector<AnswerPair> ingest_nq_open(std::span<const NqOpenRecord> records) {
  const NormalizationProfile profile = NormalizationProfile::english();
  std::vector<AnswerPair> out;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& record = records[k];
    if (record.gold_answers.size() != 1) continue;
    AnswerPair pair;
    pair.id = "nq-open:" + std::to_string(k);
    pair.first = Answer(record.gold_answers.front());
    pair.second = Answer(record.prediction);
    pair.majority_label = to_label(record.correctness);
    pair.source = Source::NqOpen;
    pair.lexical_split = lexical_split_of(pair.first.text, pair.second.text, profile);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AnswerPair> convert_annotation_csv(std::istream& in, Source source, std::string_view origin) {
  const auto rows = parse_csv(in);
  if (rows.empty()) malformed(origin, 1, "empty annotation table");

  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < rows[0].size(); ++i) columns.emplace(lower_ascii(trim(rows[0][i])), i);
  auto column = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names) {
      if (const auto it = columns.find(n); it != columns.end()) return it->second;
    }
    return std::nullopt;
  };
  const auto first_col = column({"answer1", "first", "gold_answer"});
  const auto second_col = column({"answer2", "second", "prediction"});
  if (!first_col || !second_col) malformed(origin, 1, "header needs answer1 and answer2 columns");
  const auto id_col = column({"id", "pair_id"});
  const std::optional<std::size_t> label_cols[] = {column({"label1"}), column({"label2"}), column({"label3"})};
  const auto single_label_col = column({"label", "majority"});

  const NormalizationProfile profile = profile_for(source);
  std::vector<AnswerPair> out;
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line_no = r + 1;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    auto cell = [&](std::size_t col) -> std::string { return col < row.size() ? trim(row[col]) : std::string{}; };
    auto label_at = [&](std::size_t col) -> std::optional<SimilarityLabel> {
      const std::string v = cell(col);
      if (v.empty()) return std::nullopt;
      if (v != "0" && v != "1" && v != "2") malformed(origin, line_no, "label '" + v + "' is not 0, 1 or 2");
      return SimilarityLabel(v[0] - '0');
    };

    AnswerPair pair;
    pair.id = id_col ? cell(*id_col) : std::string{};
    if (pair.id.empty()) pair.id = std::string(to_string(source)) + ":csv:" + std::to_string(r);
    if (!ids.insert(pair.id).second) malformed(origin, line_no, "duplicate pair id '" + pair.id + "'");
    pair.first = Answer(*first_col < row.size() ? row[*first_col] : std::string{});
    pair.second = Answer(*second_col < row.size() ? row[*second_col] : std::string{});
    pair.source = source;
    pair.lexical_split = lexical_split_of(pair.first.text, pair.second.text, profile);

    for (std::size_t k = 0; k < 3; ++k) {
      if (!label_cols[k]) continue;
      if (const auto l = label_at(*label_cols[k])) {
        pair.annotator_labels.push_back(AnnotatorLabel{"annotator" + std::to_string(k + 1), *l});
      }
    }
    if (!pair.annotator_labels.empty()) {
      try {
        pair.majority_label = resolve_majority(pair.annotator_labels, pair.id);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
      }
    } else if (single_label_col) {
      pair.majority_label = label_at(*single_label_col);
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<AnswerPair> convert_annotation_csv_file(const std::string& path, Source source) {
  auto in = open_input(path);
  return convert_annotation_csv(in, source, path);
}

SplitCounts count_splits(std::span<const AnswerPair> pairs) {
  SplitCounts counts;
  for (const auto& p : pairs) {
    if (p.lexical_split == LexicalSplit::F1Zero) {
      ++counts.f1_zero;
    } else {
      ++counts.f1_positive;
    }
  }
  return counts;
}

}  // namespace anssim
