#pragma once

#include <string>

namespace hybrid {

/// Porter (1980) stemmer. Input must already be lowercase ASCII; words of
/// length <= 2 and words containing non-letters are returned unchanged.
std::string porter_stem(const std::string& word);

}  // namespace hybrid
