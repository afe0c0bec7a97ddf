#include "vericlaim/wiki.hpp"

#include <algorithm>
#include <set>

#include "vericlaim/errors.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

void to_json(nlohmann::json& j, const ScoredExtract& s) {
    j = nlohmann::json{{"entity", s.candidate.entity},
                       {"title", s.candidate.title},
                       {"extract_text", s.candidate.extract_text},
                       {"page_id", s.candidate.page_id},
                       {"rank", s.candidate.rank},
                       {"extract_sim", s.extract_sim},
                       {"title_sim", s.title_sim},
                       {"score", s.score}};
}

void from_json(const nlohmann::json& j, ScoredExtract& s) {
    s.candidate.entity = j.at("entity").get<Entity>();
    s.candidate.title = j.at("title").get<std::string>();
    s.candidate.extract_text = j.at("extract_text").get<std::string>();
    s.candidate.page_id = j.at("page_id").get<long>();
    s.candidate.rank = j.at("rank").get<int>();
    s.extract_sim = j.at("extract_sim").get<double>();
    s.title_sim = j.at("title_sim").get<double>();
    s.score = j.at("score").get<double>();
}

std::string to_string(DropReason r) {
    switch (r) {
        case DropReason::no_candidates: return "no_candidates";
        case DropReason::empty_extracts: return "empty_extracts";
        case DropReason::below_threshold: return "below_threshold";
        case DropReason::fetch_failed: return "fetch_failed";
        case DropReason::duplicate_page: return "duplicate_page";
    }
    return "?";
}

namespace {

DropReason parse_drop_reason(const std::string& name) {
    if (name == "no_candidates") return DropReason::no_candidates;
    if (name == "empty_extracts") return DropReason::empty_extracts;
    if (name == "below_threshold") return DropReason::below_threshold;
    if (name == "fetch_failed") return DropReason::fetch_failed;
    if (name == "duplicate_page") return DropReason::duplicate_page;
    throw ConfigError("unknown drop reason: " + name);
}

} // namespace

void to_json(nlohmann::json& j, const KnowledgeBase& kb) {
    j = nlohmann::json{{"claim_id", kb.claim_id}, {"selected", kb.selected}};
    auto& dropped = j["dropped"] = nlohmann::json::array();
    for (const auto& [entity, reason] : kb.dropped) {
        dropped.push_back({{"entity", entity}, {"reason", to_string(reason)}});
    }
}

void from_json(const nlohmann::json& j, KnowledgeBase& kb) {
    kb.claim_id = j.at("claim_id").get<std::string>();
    kb.selected = j.at("selected").get<std::vector<ScoredExtract>>();
    kb.dropped.clear();
    for (const auto& item : j.at("dropped")) {
        kb.dropped.emplace_back(item.at("entity").get<Entity>(),
                                parse_drop_reason(item.at("reason").get<std::string>()));
    }
}

WikiClient::WikiClient(std::shared_ptr<HttpTransport> transport, std::string api_base,
                       ResponseCache cache, RunMode mode, std::shared_ptr<RateLimiter> limiter,
                       RetryPolicy retry)
    : transport_(std::move(transport)),
      api_base_(std::move(api_base)),
      cache_(std::move(cache)),
      mode_(mode),
      limiter_(std::move(limiter)),
      retry_(std::move(retry)) {}

std::string WikiClient::search_url(const std::string& surface, int limit) const {
    return api_base_ + "?action=query&list=search&srsearch=" + url_encode(surface) +
           "&srlimit=" + std::to_string(limit) + "&format=json";
}

std::string WikiClient::extract_url(long page_id) const {
    return api_base_ + "?action=query&prop=extracts&exintro=1&explaintext=1&pageids=" +
           std::to_string(page_id) + "&format=json";
}

nlohmann::json WikiClient::get_json(const std::string& url) {
    std::string key = "GET " + url;
    std::string body;
    bool have_body = false;
    if (mode_ != RunMode::live && cache_.enabled()) {
        if (auto hit = cache_.get(key)) {
            body = hit->get<std::string>();
            have_body = true;
        }
    }
    if (!have_body) {
        if (mode_ == RunMode::replay) {
            throw CacheMissError("replay: no cached response for " + url);
        }
        auto response = with_retries(retry_, [&] {
            if (limiter_) limiter_->acquire();
            return transport_->get(url);
        });
        if (response.status != 200) {
            throw ProviderError("wiki API returned HTTP " + std::to_string(response.status) +
                                    " for " + url,
                                /*retriable=*/false);
        }
        body = response.body;
        if (mode_ == RunMode::record && cache_.enabled()) cache_.put(key, body);
    }
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError("malformed wiki payload for " + url + ": " + e.what(),
                            /*retriable=*/false);
    }
}

std::vector<CandidateExtract> WikiClient::fetch_candidates(const Entity& entity, int p) {
    if (trim(entity.surface).empty()) throw ConfigError("entity surface is empty");
    std::vector<CandidateExtract> candidates;
    try {
        auto search = get_json(search_url(entity.surface, p));
        if (!search.contains("query") || !search["query"].contains("search")) return candidates;

        int rank = 0;
        for (const auto& hit : search["query"]["search"]) {
            if (rank >= p) break;
            CandidateExtract candidate;
            candidate.entity = entity;
            candidate.title = hit.at("title").get<std::string>();
            candidate.page_id = hit.at("pageid").get<long>();
            candidate.rank = rank++;

            auto pages = get_json(extract_url(candidate.page_id));
            if (pages.contains("query") && pages["query"].contains("pages")) {
                for (const auto& [id, page] : pages["query"]["pages"].items()) {
                    if (page.contains("extract") && page["extract"].is_string()) {
                        candidate.extract_text = page["extract"].get<std::string>();
                    }
                    if (page.contains("title") && page["title"].is_string()) {
                        candidate.title = page["title"].get<std::string>();
                    }
                }
            }
            candidates.push_back(std::move(candidate));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError("wiki payload missing expected fields for '" + entity.surface +
                                "': " + e.what(),
                            /*retriable=*/false);
    }
    return candidates;
}

std::optional<size_t> best_scored_index(const std::vector<ScoredExtract>& scored) {
    if (scored.empty()) return std::nullopt;
    size_t best = 0;
    for (size_t i = 1; i < scored.size(); ++i) {
        const auto& a = scored[i];
        const auto& b = scored[best];
        if (a.score > b.score) {
            best = i;
        } else if (a.score == b.score) {
            if (a.candidate.rank < b.candidate.rank ||
                (a.candidate.rank == b.candidate.rank && a.candidate.title < b.candidate.title)) {
                best = i;
            }
        }
    }
    return best;
}

std::optional<ScoredExtract> select_best(const Claim& claim,
                                         const std::vector<CandidateExtract>& candidates,
                                         EmbeddingProvider& provider,
                                         const RetrievalWeights& weights) {
    std::vector<const CandidateExtract*> scorable;
    for (const auto& c : candidates) {
        if (!trim(c.extract_text).empty()) scorable.push_back(&c);
    }
    if (scorable.empty()) return std::nullopt;

    EmbeddingVector claim_vec = provider.embed(truncate_for_embedding(claim.text));
    EmbeddingVector surface_vec = provider.embed(scorable.front()->entity.surface);
    std::vector<ScoredExtract> scored;
    scored.reserve(scorable.size());
    for (const CandidateExtract* c : scorable) {
        ScoredExtract s;
        s.candidate = *c;
        s.extract_sim = cosine(provider.embed(truncate_for_embedding(c->extract_text)), claim_vec);
        s.title_sim = cosine(provider.embed(c->title), surface_vec);
        s.score = relevance_score(s.extract_sim, s.title_sim, weights);
        scored.push_back(std::move(s));
    }
    return scored[*best_scored_index(scored)];
}

std::vector<ScoredExtract> filter_by_type(const std::vector<ScoredExtract>& selected,
                                          const RetrievalWeights& weights) {
    std::vector<ScoredExtract> kept;
    for (const auto& s : selected) {
        EntityType t = s.candidate.entity.etype;
        bool core = t == EntityType::PER || t == EntityType::LOC || t == EntityType::ORG;
        if (core || s.score >= weights.theta) kept.push_back(s);
    }
    return kept;
}

KnowledgeBase build_knowledge_base(const Claim& claim, const std::vector<Entity>& entities,
                                   WikiClient& client, EmbeddingProvider& provider,
                                   const RetrievalWeights& weights, bool dedup_by_page_id) {
    KnowledgeBase kb;
    kb.claim_id = claim.id;
    std::set<long> seen_pages;
    for (const auto& entity : entities) {
        std::vector<CandidateExtract> candidates;
        try {
            candidates = client.fetch_candidates(entity, weights.p);
        } catch (const CacheMissError&) {
            throw; // incomplete replay substrate is a run-level failure
        } catch (const ProviderError&) {
            kb.dropped.emplace_back(entity, DropReason::fetch_failed);
            continue;
        }
        if (candidates.empty()) {
            kb.dropped.emplace_back(entity, DropReason::no_candidates);
            continue;
        }
        std::optional<ScoredExtract> best;
        try {
            best = select_best(claim, candidates, provider, weights);
        } catch (const CacheMissError&) {
            throw;
        } catch (const ProviderError&) {
            kb.dropped.emplace_back(entity, DropReason::fetch_failed);
            continue;
        }
        if (!best) {
            kb.dropped.emplace_back(entity, DropReason::empty_extracts);
            continue;
        }
        auto kept = filter_by_type({*best}, weights);
        if (kept.empty()) {
            kb.dropped.emplace_back(entity, DropReason::below_threshold);
            continue;
        }
        if (dedup_by_page_id && !seen_pages.insert(best->candidate.page_id).second) {
            kb.dropped.emplace_back(entity, DropReason::duplicate_page);
            continue;
        }
        kb.selected.push_back(*best);
    }
    return kb;
}

} // namespace vericlaim
