#include "vericlaim/entity.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"
#include "vericlaim/sha256.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

std::string to_string(EntityType t) {
    switch (t) {
        case EntityType::PER: return "PER";
        case EntityType::LOC: return "LOC";
        case EntityType::ORG: return "ORG";
        case EntityType::MISC: return "MISC";
        case EntityType::DISEASE: return "DISEASE";
    }
    return "?";
}

EntityType parse_entity_type(const std::string& name) {
    auto upper = name;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "PER" || upper == "PERSON") return EntityType::PER;
    if (upper == "LOC" || upper == "LOCATION" || upper == "GPE") return EntityType::LOC;
    if (upper == "ORG" || upper == "ORGANIZATION") return EntityType::ORG;
    if (upper == "MISC") return EntityType::MISC;
    if (upper == "DISEASE") return EntityType::DISEASE;
    throw ConfigError("unknown entity type: " + name);
}

void to_json(nlohmann::json& j, const Entity& e) {
    j = nlohmann::json{{"surface", e.surface},
                       {"etype", to_string(e.etype)},
                       {"source", e.source == EntitySource::ner ? "ner" : "lexicon"}};
}

void from_json(const nlohmann::json& j, Entity& e) {
    e.surface = j.at("surface").get<std::string>();
    e.etype = parse_entity_type(j.at("etype").get<std::string>());
    e.source = j.at("source").get<std::string>() == "lexicon" ? EntitySource::lexicon
                                                              : EntitySource::ner;
}

DiseaseLexicon DiseaseLexicon::ct22_default() {
    return {{"covid-19", "coronavirus", "corona virus", "sars-cov-2", "covid"}};
}

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

namespace {

std::vector<EntityMention> match_patterns(
    const std::string& text, const std::vector<std::pair<std::string, EntityType>>& patterns,
    EntitySource source, bool lowercase_surface) {
    std::vector<EntityMention> mentions;
    std::vector<std::pair<size_t, size_t>> taken;
    auto overlaps = [&](size_t b, size_t e) {
        return std::any_of(taken.begin(), taken.end(),
                           [&](const auto& t) { return b < t.second && t.first < e; });
    };
    for (const auto& [pattern, etype] : patterns) {
        size_t pos = 0;
        while ((pos = ifind(text, pattern, pos)) != std::string::npos) {
            size_t end = pos + pattern.size();
            if (on_word_boundary(text, pos, end) && !overlaps(pos, end)) {
                EntityMention m;
                m.surface = lowercase_surface ? to_lower_ascii(pattern) : text.substr(pos, end - pos);
                m.etype = etype;
                m.start = pos;
                m.end = end;
                m.source = source;
                mentions.push_back(std::move(m));
                taken.emplace_back(pos, end);
            }
            pos = end;
        }
    }
    std::sort(mentions.begin(), mentions.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
    return mentions;
}

void sort_longest_first(std::vector<std::pair<std::string, EntityType>>& patterns) {
    std::stable_sort(patterns.begin(), patterns.end(), [](const auto& a, const auto& b) {
        return a.first.size() > b.first.size();
    });
}

} // namespace

RuleNerProvider::RuleNerProvider(const std::filesystem::path& rules_file)
    : tag_("rule:" + rules_file.filename().string()) {
    nlohmann::json rules;
    try {
        rules = nlohmann::json::parse(read_file(rules_file));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bad NER rule file " + rules_file.string() + ": " + e.what());
    }
    for (auto it = rules.begin(); it != rules.end(); ++it) {
        rules_.emplace_back(it.key(), parse_entity_type(it.value().get<std::string>()));
    }
    sort_longest_first(rules_);
}

RuleNerProvider::RuleNerProvider(std::vector<std::pair<std::string, EntityType>> rules,
                                 std::string tag)
    : rules_(std::move(rules)), tag_(std::move(tag)) {
    sort_longest_first(rules_);
}

std::vector<EntityMention> RuleNerProvider::recognize(const std::string& text) {
    auto mentions = match_patterns(text, rules_, EntitySource::ner, /*lowercase_surface=*/false);
    // The provider contract excludes DISEASE; rule files may not smuggle it in.
    std::erase_if(mentions, [](const EntityMention& m) { return m.etype == EntityType::DISEASE; });
    return mentions;
}

HttpNerProvider::HttpNerProvider(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                                 std::string model, ResponseCache cache, RunMode mode,
                                 std::shared_ptr<RateLimiter> limiter, RetryPolicy retry,
                                 HttpHeaders headers)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      cache_(std::move(cache)),
      mode_(mode),
      limiter_(std::move(limiter)),
      retry_(std::move(retry)),
      headers_(std::move(headers)) {}

std::vector<EntityMention> HttpNerProvider::recognize(const std::string& text) {
    std::string key = "ner\n" + model_ + "\n" + text;
    nlohmann::json payload;
    if (mode_ != RunMode::live && cache_.enabled()) {
        if (auto hit = cache_.get(key)) payload = *hit;
    }
    if (payload.is_null()) {
        if (mode_ == RunMode::replay) {
            throw CacheMissError("replay: no cached NER response for text hash " +
                                 sha256_hex(key));
        }
        nlohmann::json request = {{"model", model_}, {"text", text}};
        auto response = with_retries(retry_, [&] {
            if (limiter_) limiter_->acquire();
            return transport_->post(endpoint_, request.dump(), "application/json", headers_);
        });
        if (response.status != 200) {
            throw ProviderError("NER provider returned HTTP " + std::to_string(response.status));
        }
        try {
            payload = nlohmann::json::parse(response.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw ProviderError(std::string("NER provider sent malformed JSON: ") + e.what());
        }
        if (mode_ == RunMode::record && cache_.enabled()) cache_.put(key, payload);
    }
    std::vector<EntityMention> mentions;
    try {
        for (const auto& item : payload.at("entities")) {
            EntityType etype;
            try {
                etype = parse_entity_type(item.at("type").get<std::string>());
            } catch (const ConfigError&) {
                continue; // unknown provider types are skipped
            }
            if (etype == EntityType::DISEASE) continue;
            EntityMention m;
            m.surface = item.at("surface").get<std::string>();
            m.etype = etype;
            m.start = item.value("start", 0u);
            m.end = item.value("end", m.start + m.surface.size());
            m.source = EntitySource::ner;
            mentions.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("NER payload missing expected fields: ") + e.what());
    }
    std::sort(mentions.begin(), mentions.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.start < b.start; });
    return mentions;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

std::vector<Entity> ner_extract(const Claim& claim, NerProvider& provider) {
    std::vector<EntityMention> mentions;
    try {
        mentions = provider.recognize(claim.text);
    } catch (const ProviderError& e) {
        throw ProviderError(std::string("NER failed for claim ") + claim.id + ": " + e.what(),
                            e.retriable(), claim.id);
    }
    std::vector<Entity> out;
    for (const auto& m : mentions) {
        if (trim(m.surface).empty()) continue;
        out.push_back({m.surface, m.etype, EntitySource::ner});
    }
    return out;
}

std::vector<Entity> lexicon_match(const Claim& claim, const DiseaseLexicon& lexicon) {
    if (lexicon.terms.empty()) throw ConfigError("disease lexicon is empty");
    std::vector<std::pair<std::string, EntityType>> patterns;
    for (const auto& term : lexicon.terms) patterns.emplace_back(term, EntityType::DISEASE);
    sort_longest_first(patterns);
    auto mentions =
        match_patterns(claim.text, patterns, EntitySource::lexicon, /*lowercase_surface=*/true);
    std::vector<Entity> out;
    std::set<std::string> seen_terms;
    for (const auto& m : mentions) {
        if (seen_terms.insert(m.surface).second) {
            out.push_back({m.surface, EntityType::DISEASE, EntitySource::lexicon});
        }
    }
    return out;
}

std::vector<Entity> extract_entities(const Claim& claim, NerProvider& provider,
                                     const std::optional<DiseaseLexicon>& lexicon) {
    // Re-run both matchers at mention level so the merged list can be ordered
    // by position in the claim.
    std::vector<EntityMention> merged;
    try {
        merged = provider.recognize(claim.text);
    } catch (const ProviderError& e) {
        throw ProviderError(std::string("NER failed for claim ") + claim.id + ": " + e.what(),
                            e.retriable(), claim.id);
    }
    std::erase_if(merged, [](const EntityMention& m) { return trim(m.surface).empty(); });
    if (lexicon) {
        std::vector<std::pair<std::string, EntityType>> patterns;
        for (const auto& term : lexicon->terms) patterns.emplace_back(term, EntityType::DISEASE);
        sort_longest_first(patterns);
        auto lex = match_patterns(claim.text, patterns, EntitySource::lexicon,
                                  /*lowercase_surface=*/true);
        merged.insert(merged.end(), lex.begin(), lex.end());
    }
    std::stable_sort(merged.begin(), merged.end(), [](const EntityMention& a, const EntityMention& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.source < b.source; // ner before lexicon on identical spans
    });
    std::vector<Entity> out;
    std::set<std::pair<std::string, EntityType>> seen;
    for (const auto& m : merged) {
        if (seen.insert({to_lower_ascii(m.surface), m.etype}).second) {
            out.push_back({m.surface, m.etype, m.source});
        }
    }
    return out;
}

} // namespace vericlaim
