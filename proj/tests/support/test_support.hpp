#pragma once

// Shared fixtures and helpers for the unit and acceptance suites.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vericlaim/corpus.hpp"
#include "vericlaim/detect.hpp"
#include "vericlaim/summarize.hpp"
#include "vericlaim/wiki.hpp"

#ifndef VERICLAIM_TEST_DIR
#error "VERICLAIM_TEST_DIR must point at the tests/ source directory"
#endif

namespace vctest {

inline std::filesystem::path tests_dir() { return VERICLAIM_TEST_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return tests_dir() / "fixtures" / rel; }
inline std::filesystem::path golden(const std::string& rel) {
    return tests_dir() / "golden" / "prompts" / "v1" / rel;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& prefix = "vericlaim_test_") {
        auto base = std::filesystem::temp_directory_path();
        static std::atomic<uint64_t> counter{0};
        auto stamp = std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1));
        path_ = base / (prefix + stamp);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline vericlaim::Claim make_claim(std::string id, std::string text,
                                   std::optional<vericlaim::Label> label = std::nullopt,
                                   vericlaim::Dataset dataset = vericlaim::Dataset::Custom,
                                   vericlaim::Split split = vericlaim::Split::test) {
    vericlaim::Claim c;
    c.id = std::move(id);
    c.text = std::move(text);
    c.dataset = dataset;
    c.split = split;
    c.gold_label = label;
    return c;
}

// --- fixtures matching the golden prompt files -----------------------------

inline vericlaim::Claim golden_claim() {
    return make_claim("g1", "The mayor of Riverton opened a new vaccine clinic in March 2021.");
}

inline std::string golden_context_text() {
    return "Riverton is a city in Fremont County, Wyoming, United States. Its public health "
           "department operates several immunization clinics.";
}

inline vericlaim::ContextSummary golden_context() {
    vericlaim::ContextSummary ctx;
    ctx.claim_id = "g1";
    ctx.text = golden_context_text();
    ctx.generator_id = "fixture";
    ctx.source_mode = vericlaim::ContextMode::summary;
    ctx.char_budget_used = ctx.text.size();
    return ctx;
}

inline std::vector<std::pair<vericlaim::Claim, vericlaim::Label>> golden_shots() {
    return {
        {make_claim("d1", "The unemployment rate fell to 3.9 percent in October."),
         vericlaim::Label::verifiable},
        {make_claim("d2", "Honestly the best soup I have ever had in my life."),
         vericlaim::Label::non_verifiable},
        {make_claim("d3", "We should all just try to be kinder to each other."),
         vericlaim::Label::non_verifiable},
    };
}

inline vericlaim::KnowledgeBase golden_kb() {
    vericlaim::KnowledgeBase kb;
    kb.claim_id = "g1";
    vericlaim::ScoredExtract s;
    s.candidate.entity = {"Riverton", vericlaim::EntityType::LOC, vericlaim::EntitySource::ner};
    s.candidate.title = "Riverton";
    s.candidate.extract_text =
        "Riverton is a city in Fremont County, Wyoming, United States. The population was "
        "10,682 at the 2020 census.";
    s.candidate.page_id = 4101;
    s.candidate.rank = 0;
    s.extract_sim = 0.61;
    s.title_sim = 0.93;
    s.score = 0.61 * 0.8 + 0.93 * 0.2;
    kb.selected.push_back(s);
    return kb;
}

// Deterministic PRNG for property tests; never std::uniform_* (portability).
struct TestRng {
    std::mt19937_64 gen;
    explicit TestRng(uint64_t seed) : gen(seed) {}

    double real(double lo, double hi) {
        double unit = static_cast<double>(gen() >> 11) / 9007199254740992.0;
        return lo + unit * (hi - lo);
    }
    size_t index(size_t bound) { return static_cast<size_t>(gen() % bound); }
    bool coin() { return (gen() & 1) != 0; }
};

} // namespace vctest
