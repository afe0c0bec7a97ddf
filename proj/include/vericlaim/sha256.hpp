#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vericlaim {

// FIPS 180-4 SHA-256 over a byte string, returned as lowercase hex.
std::string sha256_hex(std::string_view data);

// 64-bit FNV-1a, used to seed the deterministic hash embedder.
constexpr uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace vericlaim
