#include <doctest.h>

#include <cfenv>
#include <limits>
#include <sstream>

#include "anssim/error.hpp"
#include "anssim/format.hpp"
#include "anssim/pair_io.hpp"

using namespace anssim;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an anssim::Error");
  return ErrorCode::InvalidArgument;
}

AnswerPair sample() {
  AnswerPair p;
  p.id = "squad:q1:0-2";
  p.first = Answer("Joseph \"Joe\" Priestley");
  p.second = Answer("Priestly");
  p.annotator_labels = {{"a1", SimilarityLabel(1)}, {"a2", SimilarityLabel(2)}, {"a3", SimilarityLabel(2)}};
  p.majority_label = SimilarityLabel(2);
  p.lexical_split = LexicalSplit::F1Zero;
  p.source = Source::Squad;
  return p;
}

}  // namespace

TEST_CASE("pairs round-trip with sorted keys") {
  const std::string line = pair_to_jsonl(sample());
  CHECK(line ==
        R"({"first":"Joseph \"Joe\" Priestley","id":"squad:q1:0-2","labels":[{"annotator":"a1","label":1},)"
        R"({"annotator":"a2","label":2},{"annotator":"a3","label":2}],"majority":2,"second":"Priestly",)"
        R"("source":"squad","split":"F1_ZERO"})");
  CHECK(pair_from_jsonl(line) == sample());
}

TEST_CASE("pair validation") {
  CHECK(code_of([] { pair_from_jsonl(R"({"id":"x","first":"a"})"); }) == ErrorCode::MalformedInput);
  CHECK(code_of([] { pair_from_jsonl(R"({"id":"x","first":"x y","second":"x","split":"F1_ZERO"})"); }) ==
        ErrorCode::MalformedInput);
  CHECK(code_of([] {
          pair_from_jsonl(R"({"id":"x","first":"a","second":"b","labels":[{"label":2},{"label":2}],"majority":0})");
        }) == ErrorCode::MalformedInput);
  CHECK(code_of([] { pair_from_jsonl(R"({"id":"x","first":"a","second":"b","majority":5})"); }) ==
        ErrorCode::MalformedInput);
  const auto p = pair_from_jsonl(R"({"id":"x","first":"Cat","second":"cat hat"})");
  CHECK(p.lexical_split == LexicalSplit::F1Positive);
  CHECK_FALSE(p.majority_label.has_value());
}

TEST_CASE("malformed lines report their position") {
  std::istringstream in("{\"id\":\"a\",\"first\":\"x\",\"second\":\"y\"}\n\n{broken\n");
  try {
    read_pairs(in, "pairs.jsonl");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedInput);
    CHECK(std::string(e.what()).find("pairs.jsonl:3") != std::string::npos);
  }
}

TEST_CASE("scores round-trip") {
  const std::vector<MetricScore> scores{{"f1", 2.0 / 3.0, "p1", ""}, {"sas", std::nullopt, "p1", "sas-en"}};
  std::ostringstream out;
  write_scores(out, scores);
  CHECK(out.str() == "{\"metric\":\"f1\",\"model\":null,\"pair_id\":\"p1\",\"value\":0.666667}\n"
                     "{\"metric\":\"sas\",\"model\":\"sas-en\",\"pair_id\":\"p1\",\"value\":null}\n");
  std::istringstream in(out.str());
  const auto back = read_scores(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].value == doctest::Approx(0.666667));
  CHECK_FALSE(back[1].value.has_value());
  CHECK(back[1].model == "sas-en");

  std::istringstream bad(R"({"metric":"f1","pair_id":"p","value":1.5})");
  CHECK(code_of([&] { read_scores(bad); }) == ErrorCode::MalformedInput);
}

TEST_CASE("fixed six decimals") {
  CHECK(format_fixed6(0.0) == "0.000000");
  CHECK(format_fixed6(-0.0) == "0.000000");
  CHECK(format_fixed6(1.0) == "1.000000");
  CHECK(format_fixed6(2.0 / 3.0) == "0.666667");
  CHECK(format_fixed6(0.0000005) == "0.000000");  // below the tie in binary
  CHECK(format_fixed6(0.5) == "0.500000");
  CHECK(format_fixed6(0.0000025) == "0.000003");
  std::fesetround(FE_UPWARD);
  CHECK(format_fixed6(1.0 / 3.0) == "0.333333");
  std::fesetround(FE_TONEAREST);
  CHECK(format_json_number(std::nullopt) == "null");
  CHECK(format_json_number(std::numeric_limits<double>::quiet_NaN()) == "null");
  CHECK(json_quote("a\"b\\c\n\x01") == "\"a\\\"b\\\\c\\n\\u0001\"");
}
