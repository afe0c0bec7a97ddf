#include "vericlaim/detect.hpp"

#include <algorithm>
#include <cctype>

#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"
#include "vericlaim/rng.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

std::string to_string(ParseStatus s) {
    return s == ParseStatus::clean ? "clean" : "defaulted";
}

void to_json(nlohmann::json& j, const Prediction& p) {
    j = nlohmann::json{{"claim_id", p.claim_id},
                       {"label", to_string(p.label)},
                       {"parse_status", to_string(p.parse_status)},
                       {"system_tag", p.system_tag},
                       {"raw_response", p.raw_response}};
}

void from_json(const nlohmann::json& j, Prediction& p) {
    p.claim_id = j.at("claim_id").get<std::string>();
    p.label = parse_label_token(j.at("label").get<std::string>());
    p.parse_status = j.at("parse_status").get<std::string>() == "defaulted" ? ParseStatus::defaulted
                                                                            : ParseStatus::clean;
    p.system_tag = j.value("system_tag", "");
    p.raw_response = j.value("raw_response", "");
}

std::vector<std::pair<Claim, Label>> sample_few_shot(const std::vector<Claim>& train,
                                                     uint64_t seed) {
    std::vector<size_t> verifiable_idx, non_verifiable_idx;
    for (size_t i = 0; i < train.size(); ++i) {
        if (!train[i].gold_label) {
            throw ConfigError("few-shot sampling needs labeled claims: " + train[i].id);
        }
        (*train[i].gold_label == Label::verifiable ? verifiable_idx : non_verifiable_idx)
            .push_back(i);
    }
    if (verifiable_idx.empty() || non_verifiable_idx.size() < 2) {
        throw ConfigError("few-shot sampling needs >=1 verifiable and >=2 non-verifiable claims");
    }
    std::mt19937_64 gen(seed);
    seeded_shuffle(verifiable_idx, gen);
    seeded_shuffle(non_verifiable_idx, gen);
    return {
        {train[verifiable_idx[0]], Label::verifiable},
        {train[non_verifiable_idx[0]], Label::non_verifiable},
        {train[non_verifiable_idx[1]], Label::non_verifiable},
    };
}

std::string render_detection_prompt(const Claim& claim, const ContextSummary* context,
                                    const PromptConfig& cfg) {
    if (cfg.augmented && context == nullptr) {
        throw ConfigError("augmented prompt requires a context summary (claim " + claim.id + ")");
    }
    std::string prompt;
    prompt += "### Instruction:\n";
    prompt += "Determine if the input text contains verifiable claims.\n";
    prompt += "The input text contains verifiable claims if it makes specific factual statements "
              "that can be checked against evidence.\n";
    if (cfg.augmented) {
        prompt += "Additional information may help clarify what the claim refers to, but base "
                  "your decision primarily on whether the claim makes specific factual "
                  "statements.\n";
    }
    prompt += "If the input text contains claims that can be verified, respond \"Yes\". "
              "Otherwise, respond \"No\".";
    if (cfg.doubt_directive) prompt += " Note: When in doubt, choose \"Yes\".";
    prompt += "\n";
    prompt += "In the end, respond only with 'Yes' for verifiable claims or 'No' for unverifiable "
              "claims.\n";
    // Demonstrations are claim-only, even in augmented mode.
    for (const auto& [demo, label] : cfg.shots) {
        prompt += "### Input text: " + demo.text + "\n";
        prompt += std::string("### Response: ") + (label == Label::verifiable ? "Yes" : "No") + "\n";
    }
    prompt += "### Input text: " + claim.text + "\n";
    if (cfg.augmented) {
        prompt += "### Additional information: " + context->text + "\n";
    }
    prompt += "### Response:";
    return prompt;
}

std::pair<Label, ParseStatus> parse_verdict(const std::string& raw, Label default_label) {
    // Tokens are maximal alphanumeric runs; markdown and punctuation fall away.
    std::optional<Label> last;
    size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && !std::isalnum(static_cast<unsigned char>(raw[i]))) ++i;
        size_t start = i;
        while (i < raw.size() && std::isalnum(static_cast<unsigned char>(raw[i]))) ++i;
        if (i > start) {
            auto token = to_lower_ascii(std::string_view(raw).substr(start, i - start));
            if (token == "yes") last = Label::verifiable;
            else if (token == "no") last = Label::non_verifiable;
        }
    }
    if (last) return {*last, ParseStatus::clean};
    return {default_label, ParseStatus::defaulted};
}

std::string system_tag(const PromptConfig& cfg, const ContextSummary* context,
                       const std::string& provider_id) {
    std::string tag;
    if (!cfg.augmented) {
        tag = "baseline";
    } else {
        ContextMode mode = context ? context->source_mode : ContextMode::none;
        switch (mode) {
            case ContextMode::raw: tag = "cc-raw"; break;
            case ContextMode::summary: tag = "cc-summary"; break;
            case ContextMode::none: tag = "cc-none"; break;
        }
    }
    tag += cfg.shots.empty() ? "+zs" : "+fs" + std::to_string(cfg.shots.size());
    if (!cfg.doubt_directive) tag += "+nodoubt";
    return tag + "/" + provider_id;
}

Prediction classify(const Claim& claim, const ContextSummary* context, const PromptConfig& cfg,
                    LlmProvider& llm) {
    LlmRequest request;
    request.prompt = render_detection_prompt(claim, context, cfg);
    request.temperature = 0.0;
    request.max_output_tokens = 16;
    request.model = llm.id();

    Prediction prediction;
    prediction.claim_id = claim.id;
    prediction.raw_response = llm.complete(request);
    auto [label, status] = parse_verdict(prediction.raw_response, cfg.parse_default);
    prediction.label = label;
    prediction.parse_status = status;
    prediction.system_tag = system_tag(cfg, context, llm.id());
    return prediction;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    std::vector<Prediction> preds;
    for (const auto& row : read_jsonl(path)) preds.push_back(row.get<Prediction>());
    return preds;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds) {
    std::vector<nlohmann::json> rows;
    rows.reserve(preds.size());
    for (const auto& p : preds) rows.push_back(p);
    write_jsonl(path, rows);
}

} // namespace vericlaim
