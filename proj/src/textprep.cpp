#include "lyrica/textprep.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>

namespace lyrica {

namespace {

struct CaseMapping {
    char32_t upper;
    char32_t lower;
};

#include "lowercase_table.inc"

inline bool is_ascii_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
           cp == U'\v' || cp == U'\f';
}

inline bool is_removed_punct(char32_t cp) {
    return cp == U',' || cp == U'!' || cp == U'.' || cp == U'?';
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes one codepoint starting at s[i]. Returns false on malformed bytes,
// in which case the caller copies the byte through untouched.
bool decode_utf8(const std::string& s, std::size_t i, char32_t& cp,
                 std::size_t& len) {
    const auto byte = [&](std::size_t k) {
        return static_cast<unsigned char>(s[k]);
    };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        cp = b0;
        len = 1;
        return true;
    }
    std::size_t need;
    char32_t value;
    if ((b0 & 0xE0) == 0xC0) {
        need = 1;
        value = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        need = 2;
        value = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        need = 3;
        value = b0 & 0x07;
    } else {
        return false;
    }
    if (i + need >= s.size()) return false;
    for (std::size_t k = 1; k <= need; ++k) {
        unsigned char b = byte(i + k);
        if ((b & 0xC0) != 0x80) return false;
        value = (value << 6) | (b & 0x3F);
    }
    if (value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF))
        return false;
    cp = value;
    len = need + 1;
    return true;
}

void normalize_into(const std::string& text, std::string& out,
                    bool& pending_space) {
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp;
        std::size_t len;
        bool ok = decode_utf8(text, i, cp, len);
        if (!ok) {
            // invalid byte: pass through as-is
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(text[i]);
            ++i;
            continue;
        }
        i += len;
        if (is_removed_punct(cp)) continue;
        if (is_ascii_space(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        append_utf8(out, lowercase_codepoint(cp));
    }
}

}  // namespace

char32_t lowercase_codepoint(char32_t cp) {
    const CaseMapping* begin = std::begin(kLowercaseTable);
    const CaseMapping* end = std::end(kLowercaseTable);
    const CaseMapping* it = std::lower_bound(
        begin, end, cp,
        [](const CaseMapping& m, char32_t v) { return m.upper < v; });
    if (it != end && it->upper == cp) return it->lower;
    return cp;
}

std::string normalize(const std::string& title, const std::string& lyrics) {
    std::string out;
    out.reserve(title.size() + lyrics.size() + 1);
    bool pending_space = false;
    normalize_into(title, out, pending_space);
    pending_space = true;  // the joining space between title and lyrics
    normalize_into(lyrics, out, pending_space);
    return out;
}

TokenSequence tokenize(const std::string& text) {
    TokenSequence tokens;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t space = text.find(' ', start);
        if (space == std::string::npos) {
            tokens.push_back(text.substr(start));
            break;
        }
        if (space > start) tokens.push_back(text.substr(start, space - start));
        start = space + 1;
    }
    return tokens;
}

}  // namespace lyrica
