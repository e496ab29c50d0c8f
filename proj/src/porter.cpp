#include "hybrid/porter.hpp"

#include <cctype>

namespace hybrid {

namespace {

bool is_letter(char c) { return c >= 'a' && c <= 'z'; }

// A consonant is a letter other than a,e,i,o,u, and 'y' preceded by a
// consonant (or at position 0).
bool is_consonant(const std::string& w, int i) {
    char c = w[static_cast<std::size_t>(i)];
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(w, i - 1);
        default:
            return true;
    }
}

// Measure m of the stem w[0..j]: number of VC sequences.
int measure(const std::string& w, int j) {
    int n = 0;
    int i = 0;
    while (true) {
        if (i > j) return n;
        if (!is_consonant(w, i)) break;
        ++i;
    }
    ++i;
    while (true) {
        while (true) {
            if (i > j) return n;
            if (is_consonant(w, i)) break;
            ++i;
        }
        ++i;
        ++n;
        while (true) {
            if (i > j) return n;
            if (!is_consonant(w, i)) break;
            ++i;
        }
        ++i;
    }
}

bool vowel_in_stem(const std::string& w, int j) {
    for (int i = 0; i <= j; ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool double_consonant(const std::string& w, int j) {
    if (j < 1) return false;
    if (w[static_cast<std::size_t>(j)] != w[static_cast<std::size_t>(j - 1)])
        return false;
    return is_consonant(w, j);
}

// cvc, where the final c is not w, x or y; used for restoring a final 'e'.
bool cvc(const std::string& w, int j) {
    if (j < 2 || !is_consonant(w, j) || is_consonant(w, j - 1) ||
        !is_consonant(w, j - 2))
        return false;
    char c = w[static_cast<std::size_t>(j)];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, const char* s) {
    std::size_t n = 0;
    while (s[n]) ++n;
    if (n > w.size()) return false;
    return w.compare(w.size() - n, n, s) == 0;
}

// Stem length (index of last char) with the suffix removed.
int stem_j(const std::string& w, const char* s) {
    std::size_t n = 0;
    while (s[n]) ++n;
    return static_cast<int>(w.size() - n) - 1;
}

// Replace suffix if the measure condition on the remaining stem holds.
bool replace_if(std::string& w, const char* suf, const char* rep, int min_m) {
    if (!ends_with(w, suf)) return false;
    int j = stem_j(w, suf);
    if (measure(w, j) <= min_m) return true;  // matched but condition failed
    w.resize(static_cast<std::size_t>(j + 1));
    w += rep;
    return true;
}

void step1(std::string& w) {
    // 1a: plurals
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (!ends_with(w, "ss") && ends_with(w, "s")) {
        w.resize(w.size() - 1);
    }
    // 1b: -eed, -ed, -ing
    bool second = false;
    if (ends_with(w, "eed")) {
        if (measure(w, stem_j(w, "eed")) > 0) w.resize(w.size() - 1);
    } else if (ends_with(w, "ed") && vowel_in_stem(w, stem_j(w, "ed"))) {
        w.resize(w.size() - 2);
        second = true;
    } else if (ends_with(w, "ing") && vowel_in_stem(w, stem_j(w, "ing"))) {
        w.resize(w.size() - 3);
        second = true;
    }
    if (second) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w += 'e';
        } else if (double_consonant(w, static_cast<int>(w.size()) - 1)) {
            char c = w.back();
            if (c != 'l' && c != 's' && c != 'z') w.resize(w.size() - 1);
        } else if (measure(w, static_cast<int>(w.size()) - 1) == 1 &&
                   cvc(w, static_cast<int>(w.size()) - 1)) {
            w += 'e';
        }
    }
    // 1c: y -> i when there is a vowel in the stem
    if (ends_with(w, "y") && vowel_in_stem(w, static_cast<int>(w.size()) - 2))
        w.back() = 'i';
}

void step2(std::string& w) {
    if (w.size() < 3) return;
    switch (w[w.size() - 2]) {
        case 'a':
            if (replace_if(w, "ational", "ate", 0)) return;
            if (replace_if(w, "tional", "tion", 0)) return;
            break;
        case 'c':
            if (replace_if(w, "enci", "ence", 0)) return;
            if (replace_if(w, "anci", "ance", 0)) return;
            break;
        case 'e':
            if (replace_if(w, "izer", "ize", 0)) return;
            break;
        case 'l':
            if (replace_if(w, "abli", "able", 0)) return;
            if (replace_if(w, "alli", "al", 0)) return;
            if (replace_if(w, "entli", "ent", 0)) return;
            if (replace_if(w, "eli", "e", 0)) return;
            if (replace_if(w, "ousli", "ous", 0)) return;
            break;
        case 'o':
            if (replace_if(w, "ization", "ize", 0)) return;
            if (replace_if(w, "ation", "ate", 0)) return;
            if (replace_if(w, "ator", "ate", 0)) return;
            break;
        case 's':
            if (replace_if(w, "alism", "al", 0)) return;
            if (replace_if(w, "iveness", "ive", 0)) return;
            if (replace_if(w, "fulness", "ful", 0)) return;
            if (replace_if(w, "ousness", "ous", 0)) return;
            break;
        case 't':
            if (replace_if(w, "aliti", "al", 0)) return;
            if (replace_if(w, "iviti", "ive", 0)) return;
            if (replace_if(w, "biliti", "ble", 0)) return;
            break;
    }
}

void step3(std::string& w) {
    if (w.empty()) return;
    switch (w.back()) {
        case 'e':
            if (replace_if(w, "icate", "ic", 0)) return;
            if (replace_if(w, "ative", "", 0)) return;
            if (replace_if(w, "alize", "al", 0)) return;
            break;
        case 'i':
            if (replace_if(w, "iciti", "ic", 0)) return;
            break;
        case 'l':
            if (replace_if(w, "ical", "ic", 0)) return;
            if (replace_if(w, "ful", "", 0)) return;
            break;
        case 's':
            if (replace_if(w, "ness", "", 0)) return;
            break;
    }
}

void step4(std::string& w) {
    static const char* sufs[] = {"al",   "ance", "ence", "er",  "ic",  "able",
                                 "ible", "ant",  "ement", "ment", "ent", "ion",
                                 "ou",   "ism",  "ate",  "iti", "ous", "ive",
                                 "ize"};
    for (const char* s : sufs) {
        if (!ends_with(w, s)) continue;
        int j = stem_j(w, s);
        if (std::string(s) == "ion") {
            if (j < 0) return;
            char c = w[static_cast<std::size_t>(j)];
            if (c != 's' && c != 't') return;  // matched; condition failed
        }
        if (measure(w, j) > 1) w.resize(static_cast<std::size_t>(j + 1));
        return;
    }
}

void step5(std::string& w) {
    // 5a: remove final e when m>1, or m==1 and not cvc
    if (!w.empty() && w.back() == 'e') {
        int j = static_cast<int>(w.size()) - 2;
        int m = measure(w, j);
        if (m > 1 || (m == 1 && !cvc(w, j))) w.resize(w.size() - 1);
    }
    // 5b: -ll -> -l when m>1
    if (!w.empty() && w.back() == 'l' &&
        double_consonant(w, static_cast<int>(w.size()) - 1) &&
        measure(w, static_cast<int>(w.size()) - 1) > 1)
        w.resize(w.size() - 1);
}

}  // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() <= 2) return word;
    for (char c : word)
        if (!is_letter(c)) return word;
    std::string w = word;
    step1(w);
    step2(w);
    step3(w);
    step4(w);
    step5(w);
    return w;
}

}  // namespace hybrid
