#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace anssim {

/// Fixed six-decimal rendering, round-half-even on exact ties. Negative zero
/// prints as "0.000000".
std::string format_fixed6(double value);

/// format_fixed6 or "null" for an undefined value.
std::string format_json_number(const std::optional<double>& value);

/// Quoted, escaped JSON string literal.
std::string json_quote(std::string_view text);

}  // namespace anssim
