#include "anssim/text_norm.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <numeric>

#include "anssim/error.hpp"

namespace anssim {

std::string_view to_string(Language language) noexcept {
  return language == Language::En ? "en" : "de";
}

NormalizationProfile NormalizationProfile::english() { return NormalizationProfile{}; }

NormalizationProfile NormalizationProfile::german() {
  NormalizationProfile p;
  p.language = Language::De;
  p.remove_articles = false;
  p.article_list.clear();
  return p;
}

NormalizationProfile NormalizationProfile::for_language(Language language) {
  return language == Language::En ? english() : german();
}

namespace {

bool contains_whitespace(std::string_view token) {
  const icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(token.data(), static_cast<int32_t>(token.size())));
  for (int32_t i = 0; i < u.length(); i = u.moveIndex32(i, 1)) {
    if (u_isUWhiteSpace(u.char32At(i))) return true;
  }
  return false;
}

const icu::Normalizer2& normalizer_for(UnicodeForm form) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = form == UnicodeForm::Nfc ? icu::Normalizer2::getNFCInstance(status)
                                                       : icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("ICU normalizer unavailable: ") + u_errorName(status));
  }
  return *n;
}

icu::UnicodeString unicode_normalize(const icu::UnicodeString& s, const icu::Normalizer2& n) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = n.normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("unicode normalization failed: ") + u_errorName(status));
  }
  return out;
}

bool is_punctuation(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_P_MASK) != 0; }
bool is_symbol(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_S_MASK) != 0; }

std::vector<UChar32> code_points(const icu::UnicodeString& s) {
  std::vector<UChar32> out;
  out.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) out.push_back(s.char32At(i));
  return out;
}

std::vector<UChar32> strip_punctuation(const std::vector<UChar32>& cps) {
  std::vector<UChar32> out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (!is_punctuation(c) && !is_symbol(c)) {
      out.push_back(c);
      continue;
    }
    const bool digit_flanked = is_punctuation(c) && i > 0 && i + 1 < cps.size() &&
                               u_isdigit(cps[i - 1]) && u_isdigit(cps[i + 1]);
    if (!digit_flanked) out.push_back(U' ');
  }
  return out;
}

std::vector<std::string> split_tokens(const std::vector<UChar32>& cps) {
  std::vector<std::string> tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string utf8;
    current.toUTF8String(utf8);
    tokens.push_back(std::move(utf8));
    current.remove();
  };
  for (const UChar32 c : cps) {
    if (u_isUWhiteSpace(c)) {
      flush();
    } else {
      current.append(c);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> normalized_tokens(std::string_view text,
                                           const NormalizationProfile& profile) {
  const icu::Normalizer2& normalizer = normalizer_for(profile.unicode_form);
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  s = unicode_normalize(s, normalizer);
  if (profile.lowercase) {
    // Compatibility decompositions can map lowercase-stable characters onto
    // uppercase letters (U+1D2C -> "A"), so iterate to a fixed point.
    for (int round = 0; round < 8; ++round) {
      icu::UnicodeString next = s;
      next.toLower(icu::Locale::getRoot());
      next = unicode_normalize(next, normalizer);
      if (next == s) break;
      s = std::move(next);
    }
  }

  std::vector<UChar32> cps = code_points(s);
  if (profile.strip_punctuation) cps = strip_punctuation(cps);

  std::vector<std::string> tokens = split_tokens(cps);
  if (profile.remove_articles && !profile.article_list.empty()) {
    std::erase_if(tokens, [&](const std::string& t) {
      return std::find(profile.article_list.begin(), profile.article_list.end(), t) !=
             profile.article_list.end();
    });
  }
  return tokens;
}

}  // namespace

TokenSequence::TokenSequence(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) {
    if (t.empty() || contains_whitespace(t)) {
      throw Error(ErrorCode::InvalidArgument, "token must be non-empty and free of whitespace");
    }
  }
}

std::size_t NgramCounts::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0},
                         [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

std::size_t NgramCounts::count(const Ngram& gram) const noexcept {
  const auto it = counts.find(gram);
  return it == counts.end() ? 0 : it->second;
}

std::string normalize(std::string_view text, const NormalizationProfile& profile) {
  const std::vector<std::string> tokens = normalized_tokens(text, profile);
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

TokenSequence tokenize(std::string_view text, const NormalizationProfile& profile) {
  return TokenSequence(normalized_tokens(text, profile));
}

NgramCounts ngrams(const TokenSequence& tokens, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n-gram order must be at least 1");
  NgramCounts out;
  if (tokens.size() < n) return out;
  const auto& t = tokens.tokens();
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    ++out.counts[Ngram(t.begin() + static_cast<std::ptrdiff_t>(i),
                       t.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

}  // namespace anssim
