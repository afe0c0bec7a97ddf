#include "vericlaim/summarize.hpp"

#include <cmath>
#include <numeric>

#include "vericlaim/errors.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

ContextMode parse_context_mode(const std::string& name) {
    auto lower = to_lower_ascii(name);
    if (lower == "none") return ContextMode::none;
    if (lower == "raw") return ContextMode::raw;
    if (lower == "summary") return ContextMode::summary;
    throw ConfigError("unknown context mode: " + name);
}

std::string to_string(ContextMode mode) {
    switch (mode) {
        case ContextMode::none: return "none";
        case ContextMode::raw: return "raw";
        case ContextMode::summary: return "summary";
    }
    return "?";
}

void to_json(nlohmann::json& j, const ContextSummary& c) {
    j = nlohmann::json{{"claim_id", c.claim_id},
                       {"text", c.text},
                       {"generator_id", c.generator_id},
                       {"source_mode", to_string(c.source_mode)},
                       {"char_budget_used", c.char_budget_used}};
}

void from_json(const nlohmann::json& j, ContextSummary& c) {
    c.claim_id = j.at("claim_id").get<std::string>();
    c.text = j.at("text").get<std::string>();
    c.generator_id = j.at("generator_id").get<std::string>();
    c.source_mode = parse_context_mode(j.at("source_mode").get<std::string>());
    c.char_budget_used = j.at("char_budget_used").get<size_t>();
}

std::string join_extracts(const KnowledgeBase& kb, size_t char_budget) {
    size_t total = 0;
    for (const auto& s : kb.selected) total += s.candidate.extract_text.size();

    std::string joined;
    for (const auto& s : kb.selected) {
        std::string body = s.candidate.extract_text;
        if (total > char_budget) {
            // Proportional share of the budget, cut at a word boundary.
            double share = static_cast<double>(body.size()) / static_cast<double>(total);
            auto limit = static_cast<size_t>(
                std::floor(share * static_cast<double>(char_budget)));
            body = truncate_at_word_boundary(body, limit);
        }
        if (!joined.empty()) joined += "\n\n";
        joined += s.candidate.title + ": " + body;
    }
    return joined;
}

std::string render_summary_prompt(const Claim& claim, const KnowledgeBase& kb) {
    if (kb.selected.empty()) {
        throw ConfigError("cannot render summary prompt for empty knowledge base (claim " +
                          claim.id + ")");
    }
    std::string extracts = join_extracts(kb);
    std::string prompt;
    prompt += "You are a helpful assistant. Provide a factual summarization around 150 words.\n";
    prompt += "Input claim: \"" + claim.text + "\"\n";
    prompt += "Relevant Context: " + extracts + "\n";
    prompt += "Generate a concise, objective summary to the provided claim based ONLY on the "
              "provided context.";
    return prompt;
}

ContextSummary summarize(const Claim& claim, const KnowledgeBase& kb, LlmProvider& llm) {
    LlmRequest request;
    request.prompt = render_summary_prompt(claim, kb);
    request.temperature = 0.0;
    request.max_output_tokens = 400;
    request.model = llm.id();

    std::string text = llm.complete(request);
    if (trim(text).empty()) {
        throw ProviderError("summarization returned a blank response for claim " + claim.id,
                            /*retriable=*/false, claim.id);
    }
    ContextSummary summary;
    summary.claim_id = claim.id;
    summary.text = text;
    summary.generator_id = llm.id();
    summary.source_mode = ContextMode::summary;
    summary.char_budget_used = join_extracts(kb).size();
    return summary;
}

ContextSummary materialize_context(const Claim& claim, const KnowledgeBase& kb, ContextMode mode,
                                   LlmProvider* llm) {
    if (mode == ContextMode::summary && llm == nullptr) {
        throw ConfigError("summary mode requires an LLM provider");
    }
    ContextSummary out;
    out.claim_id = claim.id;
    if (mode == ContextMode::none || kb.selected.empty()) {
        // Empty knowledge bases fall back to the sentinel regardless of mode.
        out.text = kNoContextSentinel;
        out.generator_id = "none";
        out.source_mode = ContextMode::none;
        out.char_budget_used = 0;
        return out;
    }
    if (mode == ContextMode::raw) {
        out.text = join_extracts(kb);
        out.generator_id = "raw";
        out.source_mode = ContextMode::raw;
        out.char_budget_used = out.text.size();
        return out;
    }
    return summarize(claim, kb, *llm);
}

} // namespace vericlaim
