#include "anssim/lexical_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anssim/error.hpp"
#include "anssim/porter_stemmer.hpp"

namespace anssim {

namespace {

constexpr double kBleuEpsilon = 1e-9;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double harmonic_mean(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

std::size_t multiset_overlap(const TokenSequence& a, const TokenSequence& b) {
  std::map<std::string_view, std::size_t> counts;
  for (const auto& t : a) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : b) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return common;
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

SpanPrediction::SpanPrediction(std::vector<Answer> answers) : answers_(std::move(answers)) {
  if (answers_.empty()) throw Error(ErrorCode::InvalidArgument, "span prediction list is empty");
  for (std::size_t i = 0; i < answers_.size(); ++i) {
    if (!answers_[i].span) {
      throw Error(ErrorCode::MissingSpan, "prediction at rank " + std::to_string(i + 1) + " has no span");
    }
  }
}

SynonymLexicon SynonymLexicon::load(const std::string& path, const NormalizationProfile& profile) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open synonym lexicon '" + path + "'");
  return parse(in, profile);
}

SynonymLexicon SynonymLexicon::parse(std::istream& in, const NormalizationProfile& profile) {
  SynonymLexicon lexicon;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> words;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, '\t')) {
      if (!field.empty()) words.push_back(field);
    }
    if (words.size() >= 2) lexicon.add_set(words, profile);
  }
  return lexicon;
}

void SynonymLexicon::add_set(std::span<const std::string> words, const NormalizationProfile& profile) {
  std::vector<std::string> members;
  for (const auto& w : words) {
    TokenSequence tokens = tokenize(w, profile);
    if (tokens.size() == 1) members.push_back(tokens[0]);
  }
  if (members.size() < 2) return;
  const std::size_t id = next_group_++;
  for (auto& m : members) groups_[std::move(m)].insert(id);
}

bool SynonymLexicon::are_synonyms(const std::string& a, const std::string& b) const {
  const auto ia = groups_.find(a);
  const auto ib = groups_.find(b);
  if (ia == groups_.end() || ib == groups_.end()) return false;
  return std::any_of(ia->second.begin(), ia->second.end(),
                     [&](std::size_t g) { return ib->second.count(g) > 0; });
}

void MeteorParams::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidArgument, "METEOR gamma must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "METEOR alpha must lie in (0, 1)");
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "METEOR beta must be positive");
}

double exact_match(std::string_view a, std::string_view b, const NormalizationProfile& profile) {
  return normalize(a, profile) == normalize(b, profile) ? 1.0 : 0.0;
}

double token_f1(std::string_view a, std::string_view b, const NormalizationProfile& profile) {
  const TokenSequence ta = tokenize(a, profile);
  const TokenSequence tb = tokenize(b, profile);
  if (ta.empty() && tb.empty()) return 1.0;
  if (ta.empty() || tb.empty()) return 0.0;
  const std::size_t common = multiset_overlap(ta, tb);
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(ta.size());
  const double recall = static_cast<double>(common) / static_cast<double>(tb.size());
  return clamp01(harmonic_mean(precision, recall));
}

double top_n_accuracy(const SpanPrediction& predictions, const Answer& gold, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "top-n accuracy needs n >= 1");
  if (!gold.span) throw Error(ErrorCode::MissingSpan, "gold answer has no span");
  for (const auto& p : predictions.answers()) {
    if (p.context_id != gold.context_id) {
      throw Error(ErrorCode::ContextMismatch, "prediction context '" + p.context_id.value_or("") +
                                                  "' differs from gold context '" +
                                                  gold.context_id.value_or("") + "'");
    }
  }
  const auto& answers = predictions.answers();
  const std::size_t limit = std::min(n, answers.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (answers[i].span->overlaps(*gold.span)) return 1.0;
  }
  return 0.0;
}

double bleu(std::string_view candidate, std::string_view reference,
            const NormalizationProfile& profile, int max_n) {
  if (max_n < 1) throw Error(ErrorCode::InvalidArgument, "BLEU max_n must be at least 1");
  const TokenSequence cand = tokenize(candidate, profile);
  const TokenSequence ref = tokenize(reference, profile);
  if (cand.empty()) return ref.empty() ? 1.0 : 0.0;
  if (ref.empty()) return 0.0;

  const std::size_t orders = std::min(static_cast<std::size_t>(max_n), cand.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const NgramCounts cand_grams = ngrams(cand, n);
    const NgramCounts ref_grams = ngrams(ref, n);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand_grams.counts) clipped += std::min(count, ref_grams.count(gram));
    const double numerator = clipped == 0 ? kBleuEpsilon : static_cast<double>(clipped);
    log_sum += std::log(numerator / static_cast<double>(cand_grams.total()));
  }
  const double geometric = std::exp(log_sum / static_cast<double>(orders));
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return clamp01(geometric * brevity);
}

double rouge_l(std::string_view candidate, std::string_view reference,
               const NormalizationProfile& profile) {
  const TokenSequence cand = tokenize(candidate, profile);
  const TokenSequence ref = tokenize(reference, profile);
  if (cand.empty() && ref.empty()) return 1.0;
  if (cand.empty() || ref.empty()) return 0.0;
  const auto lcs = static_cast<double>(lcs_length(cand, ref));
  return clamp01(harmonic_mean(lcs / static_cast<double>(cand.size()), lcs / static_cast<double>(ref.size())));
}

MeteorAlignment meteor_align(const TokenSequence& candidate, const TokenSequence& reference,
                             const MeteorParams& params) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cand_to_ref(candidate.size(), kNone);
  std::vector<bool> ref_used(reference.size(), false);

  std::vector<std::string> cand_stems;
  std::vector<std::string> ref_stems;

  for (const MeteorStage stage : params.stages) {
    std::function<bool(std::size_t, std::size_t)> matches;
    switch (stage) {
      case MeteorStage::Exact:
        matches = [&](std::size_t i, std::size_t j) { return candidate[i] == reference[j]; };
        break;
      case MeteorStage::Stem:
        if (cand_stems.empty() && !candidate.empty()) {
          for (const auto& t : candidate) cand_stems.push_back(porter_stem(t));
          for (const auto& t : reference) ref_stems.push_back(porter_stem(t));
        }
        matches = [&](std::size_t i, std::size_t j) { return cand_stems[i] == ref_stems[j]; };
        break;
      case MeteorStage::Synonym:
        if (!params.synonyms || params.synonyms->empty()) continue;
        matches = [&](std::size_t i, std::size_t j) {
          return params.synonyms->are_synonyms(candidate[i], reference[j]);
        };
        break;
    }

    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (cand_to_ref[i] != kNone) continue;
      std::size_t chosen = kNone;
      // Extending the previous candidate token's match keeps chunks together.
      if (i > 0 && cand_to_ref[i - 1] != kNone) {
        const std::size_t next = cand_to_ref[i - 1] + 1;
        if (next < reference.size() && !ref_used[next] && matches(i, next)) chosen = next;
      }
      for (std::size_t j = 0; chosen == kNone && j < reference.size(); ++j) {
        if (!ref_used[j] && matches(i, j)) chosen = j;
      }
      if (chosen != kNone) {
        cand_to_ref[i] = chosen;
        ref_used[chosen] = true;
      }
    }
  }

  MeteorAlignment out;
  out.candidate_length = candidate.size();
  out.reference_length = reference.size();
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    if (cand_to_ref[i] != kNone) out.matches.emplace_back(i, cand_to_ref[i]);
  }
  for (std::size_t k = 0; k < out.matches.size(); ++k) {
    const bool continues = k > 0 && out.matches[k].first == out.matches[k - 1].first + 1 &&
                           out.matches[k].second == out.matches[k - 1].second + 1;
    if (!continues) ++out.chunks;
  }
  return out;
}

double meteor(std::string_view candidate, std::string_view reference,
              const NormalizationProfile& profile, const MeteorParams& params) {
  if (profile.language != Language::En) {
    throw Error(ErrorCode::UnsupportedLanguage, "METEOR is only available for English");
  }
  params.validate();
  const TokenSequence cand = tokenize(candidate, profile);
  const TokenSequence ref = tokenize(reference, profile);
  const MeteorAlignment alignment = meteor_align(cand, ref, params);
  const auto matched = static_cast<double>(alignment.matches.size());
  if (matched == 0.0) return 0.0;

  const double precision = matched / static_cast<double>(cand.size());
  const double recall = matched / static_cast<double>(ref.size());
  const double f_mean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
  const double penalty = params.gamma * std::pow(static_cast<double>(alignment.chunks) / matched, params.beta);
  return clamp01(f_mean * (1.0 - penalty));
}

double max_over_references(const PairMetric& metric, std::string_view candidate,
                           std::span<const std::string> references) {
  if (references.empty()) throw Error(ErrorCode::EmptyReferences, "no reference answers given");
  double best = 0.0;
  for (const auto& r : references) best = std::max(best, metric(candidate, r));
  return best;
}

LexicalSplit lexical_split_of(std::string_view first, std::string_view second,
                              const NormalizationProfile& profile) {
  return token_f1(first, second, profile) == 0.0 ? LexicalSplit::F1Zero : LexicalSplit::F1Positive;
}

NormalizationProfile profile_for(Source source) {
  return source == Source::GermanQuad ? NormalizationProfile::german() : NormalizationProfile::english();
}

const std::vector<std::string>& lexical_metric_names() {
  static const std::vector<std::string> names{"exact_match", "f1", "bleu", "rouge_l", "meteor"};
  return names;
}

bool is_lexical_metric(std::string_view name) {
  const auto& names = lexical_metric_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

PairMetric lexical_metric(std::string_view name, const NormalizationProfile& profile,
                          const MeteorParams& meteor_params) {
  if (name == "exact_match") {
    return [profile](std::string_view a, std::string_view b) { return exact_match(a, b, profile); };
  }
  if (name == "f1") {
    return [profile](std::string_view a, std::string_view b) { return token_f1(a, b, profile); };
  }
  if (name == "bleu") {
    return [profile](std::string_view a, std::string_view b) { return bleu(a, b, profile); };
  }
  if (name == "rouge_l") {
    return [profile](std::string_view a, std::string_view b) { return rouge_l(a, b, profile); };
  }
  if (name == "meteor") {
    return [profile, meteor_params](std::string_view a, std::string_view b) {
      return meteor(a, b, profile, meteor_params);
    };
  }
  throw Error(ErrorCode::InvalidArgument, "unknown lexical metric '" + std::string(name) + "'");
}

}  // namespace anssim
