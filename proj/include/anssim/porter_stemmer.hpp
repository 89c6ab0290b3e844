#pragma once

#include <string>
#include <string_view>

namespace anssim {

/// Classic Porter (1980) suffix stripper. Only lowercase ASCII words are
/// stemmed; anything containing other characters, or shorter than three
/// letters, is returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace anssim
