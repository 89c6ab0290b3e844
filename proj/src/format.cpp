#include "anssim/format.hpp"

#include <cfenv>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace anssim {

std::string format_fixed6(double value) {
  // printf rounds the exact binary value in the current rounding mode, which
  // is round-to-nearest-even unless someone changed it.
  const int saved = std::fegetround();
  if (saved != FE_TONEAREST) std::fesetround(FE_TONEAREST);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  if (saved != FE_TONEAREST) std::fesetround(saved);
  std::string out(buf);
  if (out == "-0.000000") out.erase(0, 1);
  return out;
}

std::string format_json_number(const std::optional<double>& value) {
  if (!value || !std::isfinite(*value)) return "null";
  return format_fixed6(*value);
}

std::string json_quote(std::string_view text) {
  return nlohmann::json(std::string(text)).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace anssim
