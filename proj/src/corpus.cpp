#include "vericlaim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"
#include "vericlaim/rng.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

std::string to_string(Dataset d) {
    switch (d) {
        case Dataset::CT22: return "CT22";
        case Dataset::PoliClaim: return "PoliClaim";
        case Dataset::Custom: return "Custom";
    }
    return "?";
}

std::string to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "?";
}

std::string to_string(Label l) {
    return l == Label::verifiable ? "verifiable" : "non_verifiable";
}

Dataset parse_dataset(const std::string& name) {
    auto lower = to_lower_ascii(name);
    if (lower == "ct22") return Dataset::CT22;
    if (lower == "policlaim") return Dataset::PoliClaim;
    if (lower == "custom") return Dataset::Custom;
    throw ConfigError("unknown dataset: " + name);
}

Split parse_split(const std::string& name) {
    auto lower = to_lower_ascii(name);
    if (lower == "train") return Split::train;
    if (lower == "dev") return Split::dev;
    if (lower == "test") return Split::test;
    throw ConfigError("unknown split: " + name);
}

Label parse_label_token(const std::string& name) {
    auto lower = to_lower_ascii(name);
    if (lower == "verifiable") return Label::verifiable;
    if (lower == "non_verifiable") return Label::non_verifiable;
    throw ConfigError("unknown label: " + name);
}

CorpusFormat parse_corpus_format(const std::string& name) {
    auto lower = to_lower_ascii(name);
    if (lower == "delimited" || lower == "csv" || lower == "tsv") return CorpusFormat::delimited;
    if (lower == "json-lines" || lower == "jsonl") return CorpusFormat::json_lines;
    throw ConfigError("unknown corpus format: " + name);
}

void to_json(nlohmann::json& j, const Claim& c) {
    j = nlohmann::json{{"id", c.id},
                       {"text", c.text},
                       {"dataset", to_string(c.dataset)},
                       {"split", to_string(c.split)}};
    if (c.gold_label) j["gold_label"] = to_string(*c.gold_label);
}

void from_json(const nlohmann::json& j, Claim& c) {
    c.id = j.at("id").get<std::string>();
    c.text = j.at("text").get<std::string>();
    c.dataset = parse_dataset(j.at("dataset").get<std::string>());
    c.split = parse_split(j.at("split").get<std::string>());
    if (j.contains("gold_label") && !j.at("gold_label").is_null()) {
        c.gold_label = parse_label_token(j.at("gold_label").get<std::string>());
    } else {
        c.gold_label.reset();
    }
}

CorpusSchema CorpusSchema::with_default_labels() {
    CorpusSchema schema;
    schema.label_map = {
        {"1", Label::verifiable},         {"yes", Label::verifiable},
        {"true", Label::verifiable},      {"verifiable", Label::verifiable},
        {"veri", Label::verifiable},      {"0", Label::non_verifiable},
        {"no", Label::non_verifiable},    {"false", Label::non_verifiable},
        {"non", Label::non_verifiable},   {"non-verifiable", Label::non_verifiable},
        {"non_verifiable", Label::non_verifiable},
        {"nonverifiable", Label::non_verifiable},
    };
    return schema;
}

namespace {

char infer_delimiter(const std::filesystem::path& path, char configured) {
    if (configured != 0) return configured;
    auto ext = to_lower_ascii(path.extension().string());
    if (ext == ".tsv" || ext == ".tab") return '\t';
    return ',';
}

// RFC 4180-style field split: quoted fields may contain the delimiter and
// doubled quotes. Embedded newlines are not supported.
std::vector<std::string> split_delimited(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"') {
            if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else {
                quoted = !quoted;
            }
        } else if (c == delim && !quoted) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

struct RowIngestor {
    const LoadOptions& options;
    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    size_t synthetic_counter = 0;

    void add_row(size_t line_no, std::optional<std::string> id, std::string text,
                 std::optional<std::string> label_token) {
        if (!valid_utf8(text)) {
            result.errors.push_back({line_no, "text is not valid UTF-8"});
            return;
        }
        Claim claim;
        claim.text = compose_latin_nfc(trim(text));
        if (claim.text.empty()) {
            result.errors.push_back({line_no, "empty text"});
            return;
        }
        claim.dataset = options.dataset;
        claim.split = options.split;
        if (id && !trim(*id).empty()) {
            claim.id = trim(*id);
        } else {
            claim.id = to_string(options.split) + ":" + std::to_string(++synthetic_counter);
        }
        if (!seen_ids.insert(claim.id).second) {
            result.errors.push_back({line_no, "duplicate id: " + claim.id});
            return;
        }
        if (label_token) {
            auto key = to_lower_ascii(trim(*label_token));
            auto it = options.schema.label_map.find(key);
            if (it == options.schema.label_map.end()) {
                result.errors.push_back({line_no, "unknown label value: " + *label_token});
                seen_ids.erase(claim.id);
                return;
            }
            claim.gold_label = it->second;
        }
        result.claims.push_back(std::move(claim));
    }
};

LoadResult load_delimited(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("corpus file not found: " + path.string());
    char delim = infer_delimiter(path, options.delimiter);

    std::string header_line;
    if (!std::getline(in, header_line)) throw IoError("empty corpus: " + path.string());
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    auto header = split_delimited(header_line, delim);

    auto column_index = [&](const std::string& name) -> int {
        for (size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return static_cast<int>(i);
        }
        return -1;
    };

    int text_col = column_index(options.schema.text_column);
    if (text_col < 0) {
        throw IoError("unmapped column '" + options.schema.text_column + "' in " + path.string());
    }
    int label_col = -1;
    if (!options.schema.label_column.empty()) {
        label_col = column_index(options.schema.label_column);
        if (label_col < 0) {
            throw IoError("unmapped column '" + options.schema.label_column + "' in " +
                          path.string());
        }
    }
    int id_col = options.schema.id_column.empty() ? -1 : column_index(options.schema.id_column);
    if (!options.schema.id_column.empty() && id_col < 0) {
        throw IoError("unmapped column '" + options.schema.id_column + "' in " + path.string());
    }

    RowIngestor ingestor{options, {}, {}, 0};
    std::string line;
    size_t line_no = 1;
    size_t needed = static_cast<size_t>(std::max({text_col, label_col, id_col})) + 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_delimited(line, delim);
        if (fields.size() < needed) {
            ingestor.result.errors.push_back({line_no, "expected at least " +
                                                           std::to_string(needed) + " columns, got " +
                                                           std::to_string(fields.size())});
            continue;
        }
        std::optional<std::string> id;
        if (id_col >= 0) id = fields[static_cast<size_t>(id_col)];
        std::optional<std::string> label;
        if (label_col >= 0) label = fields[static_cast<size_t>(label_col)];
        ingestor.add_row(line_no, id, fields[static_cast<size_t>(text_col)], label);
    }
    return std::move(ingestor.result);
}

LoadResult load_json_lines(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("corpus file not found: " + path.string());
    RowIngestor ingestor{options, {}, {}, 0};
    std::string line;
    size_t line_no = 0;
    std::string text_field = options.schema.text_column.empty() ? "text" : options.schema.text_column;
    std::string label_field = options.schema.label_column;
    std::string id_field = options.schema.id_column.empty() ? "id" : options.schema.id_column;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            ingestor.result.errors.push_back({line_no, std::string("bad JSON: ") + e.what()});
            continue;
        }
        if (!row.contains(text_field) || !row[text_field].is_string()) {
            ingestor.result.errors.push_back({line_no, "missing text field '" + text_field + "'"});
            continue;
        }
        std::optional<std::string> id;
        if (row.contains(id_field) && row[id_field].is_string()) {
            id = row[id_field].get<std::string>();
        } else if (row.contains(id_field) && row[id_field].is_number_integer()) {
            id = std::to_string(row[id_field].get<long long>());
        }
        std::optional<std::string> label;
        if (!label_field.empty()) {
            if (!row.contains(label_field) || row[label_field].is_null()) {
                ingestor.result.errors.push_back({line_no, "missing label field '" + label_field + "'"});
                continue;
            }
            const auto& lv = row[label_field];
            label = lv.is_string() ? lv.get<std::string>() : lv.dump();
        }
        ingestor.add_row(line_no, id, row[text_field].get<std::string>(), label);
    }
    return std::move(ingestor.result);
}

} // namespace

LoadResult load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    LoadResult result = options.format == CorpusFormat::delimited
                            ? load_delimited(path, options)
                            : load_json_lines(path, options);
    if (result.claims.empty()) {
        throw IoError("empty corpus: no valid data rows in " + path.string());
    }
    return result;
}

LoadResult load_dataset_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("bad manifest " + manifest_path.string() + ": " + e.what());
    }
    LoadOptions base;
    base.dataset = parse_dataset(manifest.at("dataset").get<std::string>());
    if (manifest.contains("schema")) {
        const auto& s = manifest["schema"];
        if (s.contains("id")) base.schema.id_column = s["id"].get<std::string>();
        if (s.contains("text")) base.schema.text_column = s["text"].get<std::string>();
        if (s.contains("label")) base.schema.label_column = s["label"].get<std::string>();
        if (s.contains("label_map")) {
            base.schema.label_map.clear();
            for (auto it = s["label_map"].begin(); it != s["label_map"].end(); ++it) {
                base.schema.label_map[to_lower_ascii(it.key())] =
                    parse_label_token(it.value().get<std::string>());
            }
        }
    }
    LoadResult combined;
    auto dir = manifest_path.parent_path();
    for (const auto& entry : manifest.at("splits")) {
        LoadOptions options = base;
        options.split = parse_split(entry.at("split").get<std::string>());
        std::filesystem::path file = dir / entry.at("path").get<std::string>();
        if (entry.contains("format")) {
            options.format = parse_corpus_format(entry["format"].get<std::string>());
        } else {
            auto ext = to_lower_ascii(file.extension().string());
            options.format = ext == ".jsonl" ? CorpusFormat::json_lines : CorpusFormat::delimited;
        }
        auto one = load_corpus(file, options);
        for (auto& c : one.claims) combined.claims.push_back(std::move(c));
        for (auto& e : one.errors) combined.errors.push_back(e);
    }
    // Uniqueness must hold across the whole corpus, not just per split.
    std::unordered_set<std::string> ids;
    for (const auto& c : combined.claims) {
        if (!ids.insert(c.id).second) {
            throw IoError("duplicate claim id across splits: " + c.id);
        }
    }
    return combined;
}

std::vector<Claim> read_canonical_corpus(const std::filesystem::path& path) {
    std::vector<Claim> claims;
    for (const auto& row : read_jsonl(path)) claims.push_back(row.get<Claim>());
    std::unordered_set<std::string> ids;
    for (const auto& c : claims) {
        if (c.text.empty()) throw IoError("empty claim text for id " + c.id);
        if (!ids.insert(c.id).second) throw IoError("duplicate claim id: " + c.id);
    }
    return claims;
}

void write_canonical_corpus(const std::filesystem::path& path, const std::vector<Claim>& claims) {
    std::vector<nlohmann::json> rows;
    rows.reserve(claims.size());
    for (const auto& c : claims) rows.push_back(c);
    write_jsonl(path, rows);
}

std::pair<std::vector<Claim>, std::vector<Claim>> stratified_split(const std::vector<Claim>& claims,
                                                                   double dev_fraction,
                                                                   uint64_t seed) {
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
        throw ConfigError("dev_fraction must be in (0, 1)");
    }
    std::vector<size_t> verifiable_idx, non_verifiable_idx;
    for (size_t i = 0; i < claims.size(); ++i) {
        if (!claims[i].gold_label) {
            throw ConfigError("stratified_split: claim without gold label: " + claims[i].id);
        }
        (*claims[i].gold_label == Label::verifiable ? verifiable_idx : non_verifiable_idx)
            .push_back(i);
    }

    // Overall dev size is ceil(f*n); per-class quotas start at floor(f*m_c)
    // and the remainder goes to the classes with the largest fractional part.
    const double eps = 1e-9;
    size_t n = claims.size();
    size_t dev_total = static_cast<size_t>(std::ceil(dev_fraction * static_cast<double>(n) - eps));

    struct ClassPool {
        std::vector<size_t>* indices;
        size_t quota;
        double fraction;
    };
    std::vector<ClassPool> pools;
    for (auto* idx : {&verifiable_idx, &non_verifiable_idx}) {
        double exact = dev_fraction * static_cast<double>(idx->size());
        size_t quota = static_cast<size_t>(std::floor(exact + eps));
        pools.push_back({idx, quota, exact - static_cast<double>(quota)});
    }
    size_t assigned = pools[0].quota + pools[1].quota;
    std::vector<size_t> order = pools[0].fraction >= pools[1].fraction ? std::vector<size_t>{0, 1}
                                                                       : std::vector<size_t>{1, 0};
    size_t remaining = dev_total > assigned ? dev_total - assigned : 0;
    for (size_t k = 0; remaining > 0; k = (k + 1) % order.size()) {
        auto& pool = pools[order[k]];
        if (pool.quota < pool.indices->size()) {
            ++pool.quota;
            --remaining;
        } else if (pools[order[(k + 1) % order.size()]].quota >=
                   pools[order[(k + 1) % order.size()]].indices->size()) {
            break; // both classes exhausted
        }
    }

    std::mt19937_64 gen(seed);
    std::pair<std::vector<Claim>, std::vector<Claim>> out;
    for (auto& pool : pools) {
        seeded_shuffle(*pool.indices, gen);
        for (size_t k = 0; k < pool.indices->size(); ++k) {
            const Claim& c = claims[(*pool.indices)[k]];
            (k < pool.quota ? out.second : out.first).push_back(c);
        }
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<Claim>& claims) {
    CorpusStats stats;
    auto bump = [](SplitStats& s, const Claim& c) {
        ++s.total;
        if (c.gold_label && *c.gold_label == Label::verifiable) ++s.verifiable;
    };
    for (const auto& c : claims) {
        bump(stats.by_split[c.split], c);
        bump(stats.overall, c);
    }
    auto finish = [](SplitStats& s) {
        if (s.total > 0) {
            s.verifiable_fraction = static_cast<double>(s.verifiable) / static_cast<double>(s.total);
        }
    };
    for (auto& [split, s] : stats.by_split) finish(s);
    finish(stats.overall);
    return stats;
}

nlohmann::json to_json_report(const CorpusStats& stats) {
    auto split_json = [](const SplitStats& s) {
        nlohmann::json j = {{"total", s.total}, {"verifiable", s.verifiable}};
        if (s.verifiable_fraction) {
            j["verifiable_fraction"] = *s.verifiable_fraction;
        } else {
            j["verifiable_fraction"] = nullptr;
        }
        return j;
    };
    nlohmann::json j;
    for (const auto& [split, s] : stats.by_split) j["splits"][to_string(split)] = split_json(s);
    j["overall"] = split_json(stats.overall);
    return j;
}

} // namespace vericlaim
