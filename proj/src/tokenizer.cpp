#include "hybrid/tokenizer.hpp"

#include <stdexcept>

#include "hybrid/porter.hpp"

namespace hybrid {

namespace {

// Classic 127-word English stopword list, pinned for reproducibility.
const char* kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
    "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "her", "hers", "herself", "it", "its", "itself", "they", "them",
    "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
    "that", "these", "those", "am", "is", "are", "was", "were", "be", "been",
    "being", "have", "has", "had", "having", "do", "does", "did", "doing",
    "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
    "while", "of", "at", "by", "for", "with", "about", "against", "between",
    "into", "through", "during", "before", "after", "above", "below", "to",
    "from", "up", "down", "in", "out", "on", "off", "over", "under", "again",
    "further", "then", "once", "here", "there", "when", "where", "why",
    "how", "all", "any", "both", "each", "few", "more", "most", "other",
    "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
    "too", "very", "s", "t", "can", "will", "just", "don", "should", "now"};

bool is_token_char(unsigned char c) {
    if (c >= 0x80) return true;  // non-ASCII passes through
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9');
}

char fold(unsigned char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c - 'A' + 'a');
    return static_cast<char>(c);
}

// Simplified suffix stripping for Full mode: longest applicable of
// ing/ed/es/s, with minimum stem lengths so short words survive intact.
std::string strip_suffix(const std::string& w) {
    auto ends = [&](const char* s, std::size_t n) {
        return w.size() >= n && w.compare(w.size() - n, n, s) == 0;
    };
    if (ends("ing", 3) && w.size() >= 6) return w.substr(0, w.size() - 3);
    if (ends("ed", 2) && w.size() >= 5) return w.substr(0, w.size() - 2);
    if (ends("es", 2) && w.size() >= 4) return w.substr(0, w.size() - 2);
    if (ends("s", 1) && !ends("ss", 2) && w.size() >= 4)
        return w.substr(0, w.size() - 1);
    return w;
}

}  // namespace

const std::unordered_set<std::string>& english_stopwords() {
    static const std::unordered_set<std::string> set(std::begin(kStopwords),
                                                     std::end(kStopwords));
    return set;
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        std::string tok;
        tok.swap(cur);
        if (mode != TokenizerMode::Minimal && english_stopwords().count(tok)) {
            return;
        }
        if (mode == TokenizerMode::Full) tok = strip_suffix(tok);
        else if (mode == TokenizerMode::PorterFull) tok = porter_stem(tok);
        if (!tok.empty()) out.push_back(std::move(tok));
    };
    for (unsigned char c : text) {
        if (is_token_char(c)) cur += fold(c);
        else flush();
    }
    flush();
    return out;
}

const char* tokenizer_mode_name(TokenizerMode m) {
    switch (m) {
        case TokenizerMode::Minimal: return "minimal";
        case TokenizerMode::Stopword: return "stopword";
        case TokenizerMode::Full: return "full";
        case TokenizerMode::PorterFull: return "porter_full";
    }
    return "minimal";
}

TokenizerMode tokenizer_mode_from_name(const std::string& s) {
    if (s == "minimal") return TokenizerMode::Minimal;
    if (s == "stopword") return TokenizerMode::Stopword;
    if (s == "full") return TokenizerMode::Full;
    if (s == "porter_full" || s == "nltk") return TokenizerMode::PorterFull;
    throw std::invalid_argument("unknown tokenizer mode: " + s);
}

}  // namespace hybrid
