#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vericlaim/cache.hpp"
#include "vericlaim/corpus.hpp"
#include "vericlaim/http.hpp"

namespace vericlaim {

// PER/LOC/ORG/MISC come from the NER provider; DISEASE only ever comes from
// the lexicon matcher.
enum class EntityType { PER, LOC, ORG, MISC, DISEASE };

std::string to_string(EntityType t);
EntityType parse_entity_type(const std::string& name);

enum class EntitySource { ner, lexicon };

struct Entity {
    std::string surface;
    EntityType etype = EntityType::MISC;
    EntitySource source = EntitySource::ner;

    bool operator==(const Entity&) const = default;
};

void to_json(nlohmann::json& j, const Entity& e);
void from_json(const nlohmann::json& j, Entity& e);

// A span-bearing mention as returned by a provider, before merging.
struct EntityMention {
    std::string surface;
    EntityType etype = EntityType::MISC;
    size_t start = 0;
    size_t end = 0;
    EntitySource source = EntitySource::ner;
};

class NerProvider {
public:
    virtual ~NerProvider() = default;
    virtual std::vector<EntityMention> recognize(const std::string& text) = 0;
    virtual std::string id() const = 0;
};

// Deterministic offline provider: literal patterns matched case-insensitively
// on word boundaries, loaded from a JSON rule file {"pattern": "TYPE", ...}.
class RuleNerProvider : public NerProvider {
public:
    explicit RuleNerProvider(const std::filesystem::path& rules_file);
    RuleNerProvider(std::vector<std::pair<std::string, EntityType>> rules, std::string tag);

    std::vector<EntityMention> recognize(const std::string& text) override;
    std::string id() const override { return tag_; }

private:
    std::vector<std::pair<std::string, EntityType>> rules_; // longest pattern first
    std::string tag_;
};

// HTTP provider: POST {"text": ...} -> {"entities": [{surface, type, start,
// end}]}. Responses are cached by text content; replay mode never goes to the
// network.
class HttpNerProvider : public NerProvider {
public:
    HttpNerProvider(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                    std::string model, ResponseCache cache, RunMode mode,
                    std::shared_ptr<RateLimiter> limiter = nullptr, RetryPolicy retry = {},
                    HttpHeaders headers = {});

    std::vector<EntityMention> recognize(const std::string& text) override;
    std::string id() const override { return "http:" + model_; }

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string endpoint_;
    std::string model_;
    ResponseCache cache_;
    RunMode mode_;
    std::shared_ptr<RateLimiter> limiter_;
    RetryPolicy retry_;
    HttpHeaders headers_;
};

struct DiseaseLexicon {
    std::vector<std::string> terms; // lowercase

    // The five CT22 terms.
    static DiseaseLexicon ct22_default();
};

// NER mentions for one claim, ordered by first occurrence. Provider types
// outside PER/LOC/ORG/MISC are dropped.
std::vector<Entity> ner_extract(const Claim& claim, NerProvider& provider);

// Case-insensitive, word-boundary-anchored lexicon matching. Longest terms
// match first and suppress overlapping shorter matches; one DISEASE entity
// per distinct matched term.
std::vector<Entity> lexicon_match(const Claim& claim, const DiseaseLexicon& lexicon);

// Union of NER and lexicon mentions, deduplicated by (lowercased surface,
// type) with claim order preserved. Pass no lexicon for dataset profiles
// without the DISEASE extension.
std::vector<Entity> extract_entities(const Claim& claim, NerProvider& provider,
                                     const std::optional<DiseaseLexicon>& lexicon);

} // namespace vericlaim
