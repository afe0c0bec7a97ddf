#include "vericlaim/cache.hpp"

#include <fstream>

#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"
#include "vericlaim/sha256.hpp"

namespace vericlaim {

RunMode parse_run_mode(const std::string& name) {
    if (name == "live") return RunMode::live;
    if (name == "record") return RunMode::record;
    if (name == "replay") return RunMode::replay;
    throw ConfigError("unknown run mode: " + name);
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::live: return "live";
        case RunMode::record: return "record";
        case RunMode::replay: return "replay";
    }
    return "?";
}

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return root_ / (sha256_hex(key) + ".json");
}

std::optional<nlohmann::json> ResponseCache::get(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    auto path = path_for(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        auto entry = nlohmann::json::parse(in);
        return entry.at("value");
    } catch (const nlohmann::json::exception& e) {
        throw IoError("corrupt cache entry " + path.string() + ": " + e.what());
    }
}

void ResponseCache::put(const std::string& key, const nlohmann::json& value) const {
    if (!enabled()) throw ConfigError("cache root not configured");
    nlohmann::json entry = {{"key", key}, {"value", value}};
    atomic_write_file(path_for(key), entry.dump());
}

} // namespace vericlaim
