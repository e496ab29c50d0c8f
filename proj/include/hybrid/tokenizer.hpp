#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hybrid {

/// Analyzer modes, shared bit-exactly by index build and query time.
///  - Minimal:    lowercase + split on non-alphanumeric, drop empties
///  - Stopword:   Minimal + fixed 127-word English stopword list
///  - Full:       Stopword + simplified suffix stripping (s/es/ed/ing)
///  - PorterFull: Stopword + full Porter stemmer
enum class TokenizerMode { Minimal, Stopword, Full, PorterFull };

const char* tokenizer_mode_name(TokenizerMode m);
TokenizerMode tokenizer_mode_from_name(const std::string& s);

/// Pure, deterministic. Digit runs are tokens; bytes >= 0x80 are treated as
/// token characters (passed through unchanged; case folding is ASCII-only).
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

const std::unordered_set<std::string>& english_stopwords();

}  // namespace hybrid
