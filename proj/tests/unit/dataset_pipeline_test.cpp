#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "anssim/dataset_pipeline.hpp"
#include "anssim/error.hpp"
#include "anssim/pair_io.hpp"

using namespace anssim;

namespace {

const std::filesystem::path fixtures = ANSSIM_FIXTURE_DIR;

QaRecord record(std::string id, std::vector<std::string> answers) {
  QaRecord r;
  r.question_id = std::move(id);
  for (auto& a : answers) r.answers.emplace_back(std::move(a));
  return r;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anssim::Error");
  return ErrorCode::InvalidArgument;
}

LabelRow row(std::string id, std::initializer_list<int> labels) {
  LabelRow r{std::move(id), {}, 0};
  int k = 0;
  for (int l : labels) r.labels.push_back(AnnotatorLabel{"a" + std::to_string(++k), SimilarityLabel(l)});
  return r;
}

}  // namespace

TEST_CASE("extract_pairs examples") {
  const std::vector<QaRecord> same{record("q", {"40,000", "40,000"})};
  CHECK(extract_pairs(same, Source::Squad).empty());

  const std::vector<QaRecord> three{record("q", {"Joseph Priestley", "Priestley", "Priestly"})};
  const auto pairs = extract_pairs(three, Source::Squad);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].id == "squad:q:0-1");
  CHECK(pairs[0].lexical_split == LexicalSplit::F1Positive);
  CHECK(pairs[1].id == "squad:q:0-2");
  CHECK(pairs[1].lexical_split == LexicalSplit::F1Zero);
  CHECK(pairs[2].first.text == "Priestley");
  CHECK(pairs[2].second.text == "Priestly");
}

TEST_CASE("case-only variants do not pair") {
  const std::vector<QaRecord> recs{record("q", {"Power Steering", "power steering", "the power steering"})};
  CHECK(extract_pairs(recs, Source::Squad).empty());
  CHECK(extract_pairs(recs, Source::GermanQuad).size() == 1);
}

TEST_CASE("duplicate question ids get distinct pair ids") {
  const std::vector<QaRecord> recs{record("q", {"a1", "b1"}), record("q", {"a2", "b2"})};
  const auto pairs = extract_pairs(recs, Source::Squad);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].id == "squad:q:0-1");
  CHECK(pairs[1].id == "squad:q#1:0-1");
}

TEST_CASE("squad reader") {
  const auto recs = read_squad_file((fixtures / "squad_mini.json").string());
  REQUIRE(recs.size() == 6);
  CHECK(recs[0].question_id == "q1");
  CHECK(recs[0].context_id == "Oxygen#0");
  REQUIRE(recs[0].answers[0].span.has_value());
  CHECK(recs[0].answers[0].span->start_char == 25);
  CHECK(recs[0].answers[0].span->end_char == 41);

  std::istringstream bad("{\"data\": 3}");
  CHECK(code_of([&] { read_squad(bad); }) == ErrorCode::MalformedInput);
  std::istringstream junk("not json");
  CHECK(code_of([&] { read_squad(junk); }) == ErrorCode::MalformedInput);
}

TEST_CASE("squad answer offsets count code points") {
  std::istringstream in(R"({"data":[{"title":"t","paragraphs":[{"context":"Flüsse: Elbe","qas":[{"id":"d","answers":[{"text":"Elbe","answer_start":8},{"text":"Flüsse","answer_start":0}]}]}]}]})");
  const auto recs = read_squad(in);
  CHECK(recs[0].answers[0].span->start_char == 8);
  CHECK(recs[0].answers[0].span->end_char == 12);
  CHECK(recs[0].answers[1].span->end_char == 6);
}

TEST_CASE("fixture counts") {
  const auto squad = extract_pairs(read_squad_file((fixtures / "squad_mini.json").string()), Source::Squad);
  const auto c = count_splits(squad);
  CHECK(c.total() == 12);
  CHECK(c.f1_zero == 4);
  CHECK(c.f1_positive == 8);
  const auto de = extract_pairs(read_squad_file((fixtures / "germanquad_mini.json").string()), Source::GermanQuad);
  CHECK(count_splits(de).f1_zero == 1);
  CHECK(count_splits(de).f1_positive == 3);
}

TEST_CASE("extract_pairs is deterministic") {
  const auto recs = read_squad_file((fixtures / "squad_mini.json").string());
  std::ostringstream a, b;
  write_pairs(a, extract_pairs(recs, Source::Squad));
  write_pairs(b, extract_pairs(recs, Source::Squad));
  CHECK(a.str() == b.str());
}

TEST_CASE("attach_labels majority rules") {
  const std::vector<QaRecord> recs{record("q", {"x", "y", "z"})};
  const auto pairs = extract_pairs(recs, Source::Squad);

  const std::vector<LabelRow> ok{row("squad:q:0-1", {2, 2}), row("squad:q:0-2", {0, 1, 1}),
                                 row("squad:q:1-2", {0, 1}), row("squad:q:1-2", {2})};
  const auto labeled = attach_labels(pairs, ok);
  CHECK(labeled[0].majority_label->value() == 2);
  CHECK(labeled[1].majority_label->value() == 1);
  CHECK(labeled[2].majority_label->value() == 2);
  CHECK(labeled[2].annotator_labels.size() == 3);

  const std::vector<LabelRow> unknown{row("squad:q:9-9", {1, 1})};
  CHECK(code_of([&] { attach_labels(pairs, unknown); }) == ErrorCode::UnknownPairId);
  const std::vector<LabelRow> no_tie{row("squad:q:0-1", {0, 1})};
  CHECK(code_of([&] { attach_labels(pairs, no_tie); }) == ErrorCode::MissingTieBreaker);
  const std::vector<LabelRow> single{row("squad:q:0-1", {1})};
  CHECK(code_of([&] { attach_labels(pairs, single); }) == ErrorCode::MissingLabels);
  const std::vector<LabelRow> four{row("squad:q:0-1", {0, 1, 2, 2})};
  CHECK(code_of([&] { attach_labels(pairs, four); }) == ErrorCode::MalformedInput);
}

TEST_CASE("nq-open ingest") {
  const auto recs = read_nq_open_file((fixtures / "nq_open_mini.jsonl").string());
  REQUIRE(recs.size() == 8);
  const auto pairs = ingest_nq_open(recs);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0].id == "nq-open:0");
  CHECK(pairs[0].majority_label->value() == 2);
  CHECK(pairs[1].majority_label->value() == 0);
  CHECK(pairs[3].id == "nq-open:4");
  CHECK(pairs[3].majority_label->value() == 1);
  CHECK(count_splits(pairs).f1_zero == 4);

  std::istringstream bad(R"({"gold_answers":["a"],"prediction":"b","correctness":"maybe"})");
  CHECK(code_of([&] { read_nq_open(bad); }) == ErrorCode::MalformedInput);
  CHECK(parse_nq_correctness("DEF_CORRECT") == NqCorrectness::DefinitelyCorrect);
  CHECK(parse_nq_correctness("possibly-correct") == NqCorrectness::PossiblyCorrect);
}

TEST_CASE("csv parsing") {
  std::istringstream in("a,\"b,c\",\"d \"\"e\"\"\"\r\n1,2,3\n");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d \"e\""});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("annotation csv conversion") {
  const auto pairs = convert_annotation_csv_file((fixtures / "annotations_mini.csv").string(), Source::Squad);
  REQUIRE(pairs.size() == 5);
  CHECK(pairs[1].first.text == "40,000");
  CHECK(pairs[1].majority_label->value() == 2);
  CHECK(pairs[3].first.text == "the \"UV\" light");
  CHECK(count_splits(pairs).f1_zero == 2);

  std::istringstream no_tie("answer1,answer2,label1,label2\nx,y,0,1\n");
  CHECK(code_of([&] { convert_annotation_csv(no_tie, Source::Squad); }) == ErrorCode::MissingTieBreaker);
  std::istringstream bad_label("answer1,answer2,label\nx,y,7\n");
  CHECK(code_of([&] { convert_annotation_csv(bad_label, Source::Squad); }) == ErrorCode::MalformedInput);
  std::istringstream no_cols("foo,bar\nx,y\n");
  CHECK(code_of([&] { convert_annotation_csv(no_cols, Source::Squad); }) == ErrorCode::MalformedInput);
}
