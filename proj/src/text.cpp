#include "vericlaim/text.hpp"

#include <array>
#include <cctype>
#include <cstdint>
#include <map>

namespace vericlaim {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

bool valid_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        size_t len;
        uint32_t cp;
        if (c < 0x80) { len = 1; cp = c; }
        else if ((c >> 5) == 0x6) { len = 2; cp = c & 0x1f; }
        else if ((c >> 4) == 0xe) { len = 3; cp = c & 0x0f; }
        else if ((c >> 3) == 0x1e) { len = 4; cp = c & 0x07; }
        else return false;
        if (i + len > s.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc >> 6) != 0x2) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        // Overlong encodings, surrogates, out-of-range.
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
        i += len;
    }
    return true;
}

namespace {

uint32_t decode_utf8(std::string_view s, size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) { i += 1; return c; }
    if ((c >> 5) == 0x6) {
        uint32_t cp = (uint32_t(c & 0x1f) << 6) | (s[i + 1] & 0x3f);
        i += 2;
        return cp;
    }
    if ((c >> 4) == 0xe) {
        uint32_t cp = (uint32_t(c & 0x0f) << 12) | (uint32_t(s[i + 1] & 0x3f) << 6) | (s[i + 2] & 0x3f);
        i += 3;
        return cp;
    }
    uint32_t cp = (uint32_t(c & 0x07) << 18) | (uint32_t(s[i + 1] & 0x3f) << 12) |
                  (uint32_t(s[i + 2] & 0x3f) << 6) | (s[i + 3] & 0x3f);
    i += 4;
    return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// (base letter, combining mark) -> precomposed code point. Marks covered:
// grave U+0300, acute U+0301, circumflex U+0302, tilde U+0303, diaeresis
// U+0308, ring U+030A, cedilla U+0327.
const std::map<std::pair<uint32_t, uint32_t>, uint32_t>& composition_table() {
    static const std::map<std::pair<uint32_t, uint32_t>, uint32_t> table = {
        {{'A', 0x300}, 0xC0}, {{'A', 0x301}, 0xC1}, {{'A', 0x302}, 0xC2}, {{'A', 0x303}, 0xC3},
        {{'A', 0x308}, 0xC4}, {{'A', 0x30A}, 0xC5}, {{'C', 0x327}, 0xC7}, {{'E', 0x300}, 0xC8},
        {{'E', 0x301}, 0xC9}, {{'E', 0x302}, 0xCA}, {{'E', 0x308}, 0xCB}, {{'I', 0x300}, 0xCC},
        {{'I', 0x301}, 0xCD}, {{'I', 0x302}, 0xCE}, {{'I', 0x308}, 0xCF}, {{'N', 0x303}, 0xD1},
        {{'O', 0x300}, 0xD2}, {{'O', 0x301}, 0xD3}, {{'O', 0x302}, 0xD4}, {{'O', 0x303}, 0xD5},
        {{'O', 0x308}, 0xD6}, {{'U', 0x300}, 0xD9}, {{'U', 0x301}, 0xDA}, {{'U', 0x302}, 0xDB},
        {{'U', 0x308}, 0xDC}, {{'Y', 0x301}, 0xDD},
        {{'a', 0x300}, 0xE0}, {{'a', 0x301}, 0xE1}, {{'a', 0x302}, 0xE2}, {{'a', 0x303}, 0xE3},
        {{'a', 0x308}, 0xE4}, {{'a', 0x30A}, 0xE5}, {{'c', 0x327}, 0xE7}, {{'e', 0x300}, 0xE8},
        {{'e', 0x301}, 0xE9}, {{'e', 0x302}, 0xEA}, {{'e', 0x308}, 0xEB}, {{'i', 0x300}, 0xEC},
        {{'i', 0x301}, 0xED}, {{'i', 0x302}, 0xEE}, {{'i', 0x308}, 0xEF}, {{'n', 0x303}, 0xF1},
        {{'o', 0x300}, 0xF2}, {{'o', 0x301}, 0xF3}, {{'o', 0x302}, 0xF4}, {{'o', 0x303}, 0xF5},
        {{'o', 0x308}, 0xF6}, {{'u', 0x300}, 0xF9}, {{'u', 0x301}, 0xFA}, {{'u', 0x302}, 0xFB},
        {{'u', 0x308}, 0xFC}, {{'y', 0x301}, 0xFD}, {{'y', 0x308}, 0xFF},
    };
    return table;
}

} // namespace

std::string compose_latin_nfc(std::string_view s) {
    if (!valid_utf8(s)) return std::string(s);
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    const auto& table = composition_table();
    while (i < s.size()) {
        size_t cp_start = i;
        uint32_t cp = decode_utf8(s, i);
        if (i < s.size()) {
            size_t next = i;
            uint32_t mark = decode_utf8(s, next);
            auto it = table.find({cp, mark});
            if (it != table.end()) {
                encode_utf8(it->second, out);
                i = next;
                continue;
            }
        }
        out.append(s.substr(cp_start, i - cp_start));
    }
    return out;
}

std::string truncate_at_word_boundary(std::string_view s, size_t max_chars) {
    if (s.size() <= max_chars) return trim(s);
    std::string_view prefix = s.substr(0, max_chars);
    // A cut that lands on whitespace keeps the final word intact.
    if (std::isspace(static_cast<unsigned char>(s[max_chars]))) return trim(prefix);
    size_t cut = prefix.find_last_of(" \t\n\r");
    if (cut == std::string_view::npos || cut == 0) return trim(prefix);
    return trim(prefix.substr(0, cut));
}

size_t ifind(std::string_view haystack, std::string_view needle, size_t pos) {
    if (needle.empty() || needle.size() > haystack.size()) return std::string_view::npos;
    for (size_t i = pos; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (size_t k = 0; k < needle.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(haystack[i + k])) !=
                std::tolower(static_cast<unsigned char>(needle[k]))) {
                match = false;
                break;
            }
        }
        if (match) return i;
    }
    return std::string_view::npos;
}

bool on_word_boundary(std::string_view text, size_t begin, size_t end) {
    auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    if (begin > 0 && alnum(text[begin - 1])) return false;
    if (end < text.size() && alnum(text[end])) return false;
    return true;
}

size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return 0;
    size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace vericlaim
