#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vericlaim {

using json = nlohmann::json;

// One parsed object per non-blank line; throws IoError with the line number
// on malformed JSON.
std::vector<json> read_jsonl(const std::filesystem::path& path);

// Serializes each record on its own line. Writes via temp file + atomic
// rename so readers never observe a partial file.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& records);

std::string read_file(const std::filesystem::path& path);

// Temp file + rename in the destination directory.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string sha256_of_file(const std::filesystem::path& path);

} // namespace vericlaim
