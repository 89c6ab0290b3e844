#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>

#include "anssim/analysis.hpp"
#include "anssim/dataset_pipeline.hpp"
#include "anssim/error.hpp"
#include "anssim/lexical_metrics.hpp"
#include "anssim/pair_io.hpp"
#include "anssim/semantic_metrics.hpp"

namespace py = pybind11;
using namespace anssim;

namespace {

NormalizationProfile profile_named(const std::string& lang) {
  if (lang == "en") return NormalizationProfile::english();
  if (lang == "de") return NormalizationProfile::german();
  throw Error(ErrorCode::UnsupportedLanguage, "unknown language '" + lang + "'");
}

py::dict pair_to_dict(const AnswerPair& p) {
  py::dict d;
  d["id"] = p.id;
  d["first"] = p.first.text;
  d["second"] = p.second.text;
  py::list labels;
  for (const auto& l : p.annotator_labels) labels.append(l.label.value());
  d["labels"] = labels;
  d["majority"] = p.majority_label ? py::object(py::int_(p.majority_label->value())) : py::none();
  d["split"] = std::string(to_string(p.lexical_split));
  d["source"] = std::string(to_string(p.source));
  return d;
}

}  // namespace

PYBIND11_MODULE(_anssim, m) {
  m.doc() = "Answer similarity metrics";

  py::register_exception<Error>(m, "AnssimError", PyExc_ValueError);

  m.def("normalize", [](const std::string& text, const std::string& lang) {
    return normalize(text, profile_named(lang));
  }, py::arg("text"), py::arg("lang") = "en");

  m.def("tokenize", [](const std::string& text, const std::string& lang) {
    return tokenize(text, profile_named(lang)).tokens();
  }, py::arg("text"), py::arg("lang") = "en");

  m.def("lexical_metric_names", &lexical_metric_names);

  m.def("score", [](const std::string& metric, const std::string& a, const std::string& b, const std::string& lang) {
    return lexical_metric(metric, profile_named(lang))(a, b);
  }, py::arg("metric"), py::arg("first"), py::arg("second"), py::arg("lang") = "en",
     "Lexical metric by name: exact_match, f1, bleu, rouge_l or meteor.");

  m.def("max_over_references", [](const std::string& metric, const std::string& candidate,
                                   const std::vector<std::string>& references, const std::string& lang) {
    return max_over_references(lexical_metric(metric, profile_named(lang)), candidate, references);
  }, py::arg("metric"), py::arg("candidate"), py::arg("references"), py::arg("lang") = "en");

  m.def("meteor", [](const std::string& a, const std::string& b, const std::vector<std::vector<std::string>>& synonyms) {
    const auto profile = NormalizationProfile::english();
    MeteorParams params;
    if (!synonyms.empty()) {
      auto lexicon = std::make_shared<SynonymLexicon>();
      for (const auto& group : synonyms) lexicon->add_set(group, profile);
      params.synonyms = lexicon;
    }
    return meteor(a, b, profile, params);
  }, py::arg("candidate"), py::arg("reference"), py::arg("synonyms") = std::vector<std::vector<std::string>>{});

  m.def("pearson_r", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_r(x, y); });
  m.def("kendall_tau_b", [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau_b(x, y); });

  m.def("majority_vote", [](const std::vector<int>& labels) -> std::optional<int> {
    std::vector<SimilarityLabel> ls;
    for (int l : labels) ls.emplace_back(l);
    const auto v = majority_vote(ls);
    if (!v) return std::nullopt;
    return v->value();
  });

  m.def("extract_squad_pairs", [](const std::string& json, const std::string& source) {
    const auto src = parse_source(source);
    if (!src) throw Error(ErrorCode::InvalidArgument, "unknown source '" + source + "'");
    std::istringstream in(json);
    py::list out;
    for (const auto& p : extract_pairs(read_squad(in), *src)) out.append(pair_to_dict(p));
    return out;
  }, py::arg("json"), py::arg("source") = "squad");

  m.def("read_pairs", [](const std::string& jsonl) {
    std::istringstream in(jsonl);
    py::list out;
    for (const auto& p : read_pairs(in)) out.append(pair_to_dict(p));
    return out;
  });

  m.def("synthetic_bertscore", [](const std::string& a, const std::string& b, const std::string& model, int layer) {
    SyntheticBackend backend;
    const auto s = bertscore(a, b, backend, model, layer);
    return py::make_tuple(s.precision, s.recall, s.f1);
  }, py::arg("candidate"), py::arg("reference"), py::arg("model") = "bertscore-vanilla-en",
     py::arg("layer") = kVanillaBertScoreLayer);

  m.def("synthetic_sas", [](const std::string& a, const std::string& b, const std::string& model) {
    SyntheticBackend backend;
    return sas_score(a, b, backend, model);
  }, py::arg("first"), py::arg("second"), py::arg("model") = "sas-en");
}
