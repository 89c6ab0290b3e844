#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace anssim {

enum class Language { En, De };
enum class UnicodeForm { Nfc, Nfkc };

std::string_view to_string(Language language) noexcept;

/// Settings for the lexical normalization pipeline. Use english() / german()
/// for the defaults and override individual fields as needed.
struct NormalizationProfile {
  Language language = Language::En;
  bool lowercase = true;
  bool strip_punctuation = true;
  bool remove_articles = true;
  std::vector<std::string> article_list{"a", "an", "the"};
  UnicodeForm unicode_form = UnicodeForm::Nfc;

  static NormalizationProfile english();
  static NormalizationProfile german();
  static NormalizationProfile for_language(Language language);
};

/// Ordered list of non-empty, whitespace-free tokens.
class TokenSequence {
 public:
  TokenSequence() = default;
  /// Throws InvalidArgument if a token is empty or contains whitespace.
  explicit TokenSequence(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens_[i]; }
  auto begin() const noexcept { return tokens_.begin(); }
  auto end() const noexcept { return tokens_.end(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;

 private:
  std::vector<std::string> tokens_;
};

using Ngram = std::vector<std::string>;

/// Multiset of n-grams.
struct NgramCounts {
  std::map<Ngram, std::size_t> counts;

  std::size_t total() const noexcept;
  std::size_t count(const Ngram& gram) const noexcept;
};

/// Unicode normalization, lowercasing, punctuation removal, article removal
/// and whitespace collapse, in that order. Punctuation and symbols (Unicode
/// P* and S*) become a space, except that a punctuation mark between two
/// digits is deleted outright so "40,000" stays one token. Idempotent.
std::string normalize(std::string_view text, const NormalizationProfile& profile);

/// normalize() followed by a whitespace split.
TokenSequence tokenize(std::string_view text, const NormalizationProfile& profile);

/// All contiguous windows of length n. Throws InvalidArgument when n == 0.
NgramCounts ngrams(const TokenSequence& tokens, std::size_t n);

}  // namespace anssim
