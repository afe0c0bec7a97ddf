#pragma once

#include <string>

#include <json.hpp>

#include "vericlaim/corpus.hpp"
#include "vericlaim/llm.hpp"
#include "vericlaim/wiki.hpp"

namespace vericlaim {

enum class ContextMode { none, raw, summary };
ContextMode parse_context_mode(const std::string& name);
std::string to_string(ContextMode mode);

// Emitted verbatim when a claim has no retrieved context; the classification
// template stays the same either way.
inline constexpr const char* kNoContextSentinel = "No additional context retrieved.";

// Joined knowledge-base payload stays within this budget; overruns shrink
// every extract proportionally at word boundaries.
inline constexpr size_t kContextCharBudget = 6000;

struct ContextSummary {
    std::string claim_id;
    std::string text;
    std::string generator_id;            // provider/model tag, or "raw"/"none"
    ContextMode source_mode = ContextMode::none;
    size_t char_budget_used = 0;
};

void to_json(nlohmann::json& j, const ContextSummary& c);
void from_json(const nlohmann::json& j, ContextSummary& c);

// "<title>: <extract>" blocks joined by blank lines, proportionally truncated
// to the budget.
std::string join_extracts(const KnowledgeBase& kb, size_t char_budget = kContextCharBudget);

// Byte-exact summarization prompt for a claim and its knowledge base.
// Throws ConfigError when the knowledge base is empty.
std::string render_summary_prompt(const Claim& claim, const KnowledgeBase& kb);

// c = g(claim, kb) through the provider; output recorded verbatim.
ContextSummary summarize(const Claim& claim, const KnowledgeBase& kb, LlmProvider& llm);

// none -> sentinel; raw -> joined extracts; summary -> summarize(). A summary
// or raw request over an empty knowledge base falls back to the sentinel with
// source_mode none.
ContextSummary materialize_context(const Claim& claim, const KnowledgeBase& kb, ContextMode mode,
                                   LlmProvider* llm);

} // namespace vericlaim
