#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vericlaim/corpus.hpp"
#include "vericlaim/llm.hpp"
#include "vericlaim/summarize.hpp"

namespace vericlaim {

// Which blocks of the detection template are rendered. The baseline prompt
// omits both context blocks; the bias ablation drops the doubt sentence.
struct PromptConfig {
    bool augmented = false;
    bool doubt_directive = true;
    std::vector<std::pair<Claim, Label>> shots; // empty = zero-shot
    Label parse_default = Label::verifiable;    // mirrors the doubt directive
};

enum class ParseStatus { clean, defaulted };
std::string to_string(ParseStatus s);

struct Prediction {
    std::string claim_id;
    Label label = Label::verifiable;
    std::string raw_response;
    ParseStatus parse_status = ParseStatus::clean;
    std::string system_tag;
};

void to_json(nlohmann::json& j, const Prediction& p);
void from_json(const nlohmann::json& j, Prediction& p);

// Three demonstrations (one verifiable, two non-verifiable) drawn with a
// seeded class-balanced sampler; deterministic for a fixed seed.
std::vector<std::pair<Claim, Label>> sample_few_shot(const std::vector<Claim>& train,
                                                     uint64_t seed);

// Byte-exact detection prompt. Demonstrations render claim-only, before the
// query; context may be null when cfg.augmented is false.
std::string render_detection_prompt(const Claim& claim, const ContextSummary* context,
                                    const PromptConfig& cfg);

// Scans for standalone yes/no tokens (case-insensitive, punctuation
// stripped); the last occurrence wins. Total: unparseable responses map to
// the configured default with status `defaulted`.
std::pair<Label, ParseStatus> parse_verdict(const std::string& raw, Label default_label);

// One provider call per claim: render -> complete (temperature 0) -> parse.
Prediction classify(const Claim& claim, const ContextSummary* context, const PromptConfig& cfg,
                    LlmProvider& llm);

// "baseline" / "cc-raw" / "cc-summary" (+few-shot/doubt markers) / provider.
std::string system_tag(const PromptConfig& cfg, const ContextSummary* context,
                       const std::string& provider_id);

std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds);

} // namespace vericlaim
