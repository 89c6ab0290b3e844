#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anssim/core_types.hpp"
#include "anssim/text_norm.hpp"

namespace anssim {

/// Ranked span predictions (rank 1 first). Every answer must carry a span.
class SpanPrediction {
 public:
  /// Throws InvalidArgument for an empty list, MissingSpan if a span is absent.
  explicit SpanPrediction(std::vector<Answer> answers);

  const std::vector<Answer>& answers() const noexcept { return answers_; }

 private:
  std::vector<Answer> answers_;
};

enum class MeteorStage { Exact, Stem, Synonym };

/// Symmetric synonym relation loaded from a tab-separated file, one synonym
/// set per line. Entries are normalized with the profile used for matching.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  static SynonymLexicon load(const std::string& path, const NormalizationProfile& profile);
  static SynonymLexicon parse(std::istream& in, const NormalizationProfile& profile);

  /// Entries that normalize to anything other than a single token are skipped.
  void add_set(std::span<const std::string> words, const NormalizationProfile& profile);
  bool are_synonyms(const std::string& a, const std::string& b) const;
  bool empty() const noexcept { return groups_.empty(); }

 private:
  // token -> ids of the synonym sets containing it
  std::map<std::string, std::set<std::size_t>> groups_;
  std::size_t next_group_ = 0;
};

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
  std::vector<MeteorStage> stages{MeteorStage::Exact, MeteorStage::Stem, MeteorStage::Synonym};
  /// The synonym stage is skipped when no lexicon is supplied.
  std::shared_ptr<const SynonymLexicon> synonyms;

  /// Throws InvalidArgument unless 0 <= gamma <= 1, 0 < alpha < 1 and beta > 0.
  void validate() const;
};

double exact_match(std::string_view a, std::string_view b, const NormalizationProfile& profile);

/// Multiset-overlap F1 of the two token sequences. Both empty -> 1, one empty -> 0.
double token_f1(std::string_view a, std::string_view b, const NormalizationProfile& profile);

/// 1 if any of the first n predicted spans overlaps the gold span by at least
/// one character. Context ids of every span must agree.
double top_n_accuracy(const SpanPrediction& predictions, const Answer& gold, std::size_t n);

/// Sentence-level BLEU with epsilon smoothing of zero match counts. Orders
/// above the candidate length are left out of the geometric mean.
double bleu(std::string_view candidate, std::string_view reference,
            const NormalizationProfile& profile, int max_n = 4);

/// Balanced F-measure of LCS precision and recall over tokens.
double rouge_l(std::string_view candidate, std::string_view reference,
               const NormalizationProfile& profile);

/// Unigram alignment result used by meteor(); exposed for tests and reports.
struct MeteorAlignment {
  /// (candidate index, reference index), sorted by candidate index.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::size_t chunks = 0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

MeteorAlignment meteor_align(const TokenSequence& candidate, const TokenSequence& reference,
                             const MeteorParams& params);

/// Throws UnsupportedLanguage for German profiles.
double meteor(std::string_view candidate, std::string_view reference,
              const NormalizationProfile& profile, const MeteorParams& params = {});

using PairMetric = std::function<double(std::string_view, std::string_view)>;

/// Best score of the candidate over all references. Throws EmptyReferences.
double max_over_references(const PairMetric& metric, std::string_view candidate,
                           std::span<const std::string> references);

/// Split tag of a pair: F1_ZERO iff the token F1 of the two texts is 0.
LexicalSplit lexical_split_of(std::string_view first, std::string_view second,
                              const NormalizationProfile& profile);

/// Normalization profile implied by a pair source (German for GermanQuAD).
NormalizationProfile profile_for(Source source);

/// Names accepted by lexical_metric(): exact_match, f1, bleu, rouge_l, meteor.
const std::vector<std::string>& lexical_metric_names();
bool is_lexical_metric(std::string_view name);

/// Binds a lexical metric by name. Throws InvalidArgument for unknown names.
PairMetric lexical_metric(std::string_view name, const NormalizationProfile& profile,
                          const MeteorParams& meteor_params = {});

}  // namespace anssim
