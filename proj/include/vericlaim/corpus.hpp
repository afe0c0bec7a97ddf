#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace vericlaim {

enum class Dataset { CT22, PoliClaim, Custom };
enum class Split { train, dev, test };
enum class Label { verifiable, non_verifiable };

std::string to_string(Dataset d);
std::string to_string(Split s);
std::string to_string(Label l);
Dataset parse_dataset(const std::string& name);
Split parse_split(const std::string& name);
Label parse_label_token(const std::string& name);

// One input claim with its dataset/split/gold-label metadata.
struct Claim {
    std::string id;
    std::string text;
    Dataset dataset = Dataset::Custom;
    Split split = Split::train;
    std::optional<Label> gold_label;

    bool operator==(const Claim&) const = default;
};

void to_json(nlohmann::json& j, const Claim& c);
void from_json(const nlohmann::json& j, Claim& c);

enum class CorpusFormat { delimited, json_lines };
CorpusFormat parse_corpus_format(const std::string& name);

// Column mapping plus the label-normalization table. The two public datasets
// encode labels differently ("1"/"0" vs "Yes"/"No"), so the mapping is part
// of the schema rather than hardcoded.
struct CorpusSchema {
    std::string id_column;             // empty: ids are synthesized as <split>:<line>
    std::string text_column = "text";
    std::string label_column = "label"; // empty: rows load unlabeled
    std::map<std::string, Label> label_map;

    static CorpusSchema with_default_labels();
};

struct LoadOptions {
    CorpusFormat format = CorpusFormat::delimited;
    char delimiter = 0; // 0: infer from extension (.tsv/.tab tab, else comma)
    Dataset dataset = Dataset::Custom;
    Split split = Split::train;
    CorpusSchema schema = CorpusSchema::with_default_labels();
};

struct RowError {
    size_t line = 0;
    std::string message;
};

struct LoadResult {
    std::vector<Claim> claims;
    std::vector<RowError> errors;
};

// Loads one delimited or JSON-lines file. Text is trimmed and run through the
// Latin composition pass so downstream cache keys are stable. Throws IoError
// for a missing file, an unmapped column, or an empty corpus; per-row
// problems are reported in LoadResult::errors with their line numbers.
LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options);

// Loads every split listed in a dataset manifest JSON:
//   {"dataset": "CT22", "splits": [{"split": "train", "path": "...",
//    "format": "delimited"}], "schema": {...}}
// Paths resolve relative to the manifest location.
LoadResult load_dataset_manifest(const std::filesystem::path& manifest_path);

// Canonical corpus file: JSON-lines of {id, text, dataset, split, gold_label}.
std::vector<Claim> read_canonical_corpus(const std::filesystem::path& path);
void write_canonical_corpus(const std::filesystem::path& path, const std::vector<Claim>& claims);

// Seeded stratified partition into (train, dev). Each class is shuffled
// independently; the dev set takes ceil(dev_fraction * n) items distributed
// across classes by largest remainder, so per-class proportions match the
// corpus to within one item.
std::pair<std::vector<Claim>, std::vector<Claim>> stratified_split(const std::vector<Claim>& claims,
                                                                   double dev_fraction,
                                                                   uint64_t seed);

struct SplitStats {
    size_t total = 0;
    size_t verifiable = 0;
    std::optional<double> verifiable_fraction; // unset when total == 0
};

struct CorpusStats {
    std::map<Split, SplitStats> by_split;
    SplitStats overall;
};

CorpusStats corpus_stats(const std::vector<Claim>& claims);

nlohmann::json to_json_report(const CorpusStats& stats);

} // namespace vericlaim
