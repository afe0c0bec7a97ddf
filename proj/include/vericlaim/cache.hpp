#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace vericlaim {

// live: call providers, never touch the cache.
// record: call providers on a miss and persist the response.
// replay: cache only; a miss is a hard failure.
enum class RunMode { live, record, replay };

RunMode parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

// Content-addressed response store: one JSON file per key under the root,
// named by the SHA-256 of the key preimage. Writers go through temp file +
// atomic rename, so concurrent readers always see complete entries.
class ResponseCache {
public:
    ResponseCache() = default;
    explicit ResponseCache(std::filesystem::path root);

    bool enabled() const { return !root_.empty(); }
    const std::filesystem::path& root() const { return root_; }

    std::optional<nlohmann::json> get(const std::string& key) const;
    void put(const std::string& key, const nlohmann::json& value) const;

    // Path of the entry that would store this key (for diagnostics).
    std::filesystem::path path_for(const std::string& key) const;

private:
    std::filesystem::path root_;
};

} // namespace vericlaim
