#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vericlaim {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Whitespace tokenization (any run of ASCII whitespace separates tokens).
std::vector<std::string> whitespace_tokens(std::string_view s);

// True when the byte string is well-formed UTF-8.
bool valid_utf8(std::string_view s);

// Canonical composition limited to combining diacritical marks over Latin
// letters (the common case in tweet/debate text). Full Unicode NFC would need
// the UCD tables; the coverage here keeps cache keys stable for the inputs
// this pipeline actually sees.
std::string compose_latin_nfc(std::string_view s);

// Longest prefix of at most max_chars bytes that ends on a word boundary,
// right-trimmed. Falls back to a hard cut when the prefix has no whitespace.
std::string truncate_at_word_boundary(std::string_view s, size_t max_chars);

// Case-insensitive ASCII substring search from position pos; npos if absent.
size_t ifind(std::string_view haystack, std::string_view needle, size_t pos = 0);

// Word-boundary check for a half-open match range [begin, end) in text:
// neither neighbour may be alphanumeric.
bool on_word_boundary(std::string_view text, size_t begin, size_t end);

size_t count_occurrences(std::string_view haystack, std::string_view needle);

} // namespace vericlaim
