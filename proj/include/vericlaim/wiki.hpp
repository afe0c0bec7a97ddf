#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vericlaim/cache.hpp"
#include "vericlaim/corpus.hpp"
#include "vericlaim/embedding.hpp"
#include "vericlaim/entity.hpp"
#include "vericlaim/http.hpp"

namespace vericlaim {

// One search hit with its intro extract; rank is the 0-based search-result
// position. extract_text may be empty (disambiguation pages) and is then
// discarded before scoring.
struct CandidateExtract {
    Entity entity;
    std::string title;
    std::string extract_text;
    long page_id = 0;
    int rank = 0;
};

struct ScoredExtract {
    CandidateExtract candidate;
    double extract_sim = 0.0;
    double title_sim = 0.0;
    double score = 0.0;
};

void to_json(nlohmann::json& j, const ScoredExtract& s);
void from_json(const nlohmann::json& j, ScoredExtract& s);

// duplicate_page only occurs behind the opt-in page dedup flag.
enum class DropReason { no_candidates, empty_extracts, below_threshold, fetch_failed, duplicate_page };
std::string to_string(DropReason r);

struct KnowledgeBase {
    std::string claim_id;
    std::vector<ScoredExtract> selected;            // claim-entity order
    std::vector<std::pair<Entity, DropReason>> dropped;
};

void to_json(nlohmann::json& j, const KnowledgeBase& kb);
void from_json(const nlohmann::json& j, KnowledgeBase& kb);

// MediaWiki client over the search + extracts endpoints. Query strings are
// byte-stable so they double as cache keys; the cache carries whole HTTP
// responses, which makes recorded runs replayable offline.
class WikiClient {
public:
    WikiClient(std::shared_ptr<HttpTransport> transport, std::string api_base,
               ResponseCache cache, RunMode mode, std::shared_ptr<RateLimiter> limiter = nullptr,
               RetryPolicy retry = {});

    std::string search_url(const std::string& surface, int limit) const;
    std::string extract_url(long page_id) const;

    // At most p candidates in search-rank order, each with its intro extract.
    std::vector<CandidateExtract> fetch_candidates(const Entity& entity, int p);

private:
    nlohmann::json get_json(const std::string& url);

    std::shared_ptr<HttpTransport> transport_;
    std::string api_base_;
    ResponseCache cache_;
    RunMode mode_;
    std::shared_ptr<RateLimiter> limiter_;
    RetryPolicy retry_;
};

// Index of the best candidate under (score desc, rank asc, title asc); the
// tie-break chain makes selection total and deterministic.
std::optional<size_t> best_scored_index(const std::vector<ScoredExtract>& scored);

// Scores every non-empty candidate and returns the argmax, or nullopt when
// nothing is scorable. extract_sim compares extract to claim, title_sim
// compares article title to the entity surface.
std::optional<ScoredExtract> select_best(const Claim& claim,
                                         const std::vector<CandidateExtract>& candidates,
                                         EmbeddingProvider& provider,
                                         const RetrievalWeights& weights);

// PER/LOC/ORG pass unconditionally; MISC and DISEASE need score >= theta.
// Relative order is preserved.
std::vector<ScoredExtract> filter_by_type(const std::vector<ScoredExtract>& selected,
                                          const RetrievalWeights& weights);

// fetch -> select -> filter per entity, in entity order. Per-entity failures
// are recorded in `dropped` and never abort the claim.
KnowledgeBase build_knowledge_base(const Claim& claim, const std::vector<Entity>& entities,
                                   WikiClient& client, EmbeddingProvider& provider,
                                   const RetrievalWeights& weights,
                                   bool dedup_by_page_id = false);

} // namespace vericlaim
