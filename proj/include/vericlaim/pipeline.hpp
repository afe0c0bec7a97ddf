#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vericlaim/cache.hpp"
#include "vericlaim/corpus.hpp"
#include "vericlaim/detect.hpp"
#include "vericlaim/embedding.hpp"
#include "vericlaim/entity.hpp"
#include "vericlaim/http.hpp"
#include "vericlaim/llm.hpp"
#include "vericlaim/summarize.hpp"
#include "vericlaim/wiki.hpp"

namespace vericlaim {

// How one provider slot is backed. kind: "http", or the offline fallbacks
// "rule" (NER) / "hash" (embeddings).
struct ProviderConfig {
    std::string kind = "http";
    std::string endpoint;
    std::string model;
    std::string rules_file;  // rule NER
    size_t dim = 64;         // hash embedder
    double rps = 2.0;
    std::string api_key_env; // env var holding the bearer token, if any
};

struct PipelineConfig {
    PipelineConfig() { embedding.kind = "hash"; }

    Dataset profile = Dataset::Custom; // CT22 enables the DISEASE lexicon
    RetrievalWeights weights;          // p=5, alpha=0.8, beta=0.2, theta=0.5
    bool dedup_pages = false;

    std::string wiki_api = "https://en.wikipedia.org/w/api.php";
    double wiki_rps = 10.0;

    ProviderConfig ner;
    ProviderConfig embedding; // offline hash embedder unless configured
    ProviderConfig summarizer;
    ProviderConfig classifier;

    ContextMode context_mode = ContextMode::summary;
    bool doubt_directive = true;
    int shots = 0;                       // 0 or 3 in paper-faithful runs
    std::filesystem::path few_shot_train; // canonical corpus; required when shots > 0
    Label parse_default = Label::verifiable;

    std::filesystem::path cache_root;
    RunMode mode = RunMode::replay;
    uint64_t seed = 42;
    int workers = 8;
    bool manifest_timestamps = false; // wall-clock stamps break byte-identity

    void validate() const;

    // Seed defaults must equal the fixed retrieval parameters; the CLI runs
    // this on startup.
    static void defaults_self_check();

    // Semantic snapshot for the manifest: machine-local paths excluded.
    nlohmann::json snapshot() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct StageArtifact {
    std::string name;
    std::string path; // relative to the run directory
    std::string sha256;
};

struct ClaimFailure {
    std::string claim_id;
    std::string stage;
    std::string message;
};

struct RunManifest {
    nlohmann::json config;
    std::string corpus_sha256;
    size_t claim_count = 0;
    std::vector<StageArtifact> artifacts;
    nlohmann::json providers;
    std::vector<ClaimFailure> failures;
    std::optional<std::string> started_at; // only with manifest_timestamps

    nlohmann::json to_json() const;
};

// Every provider the pipeline needs, built per config. transport may be null:
// replay mode then gets a NullTransport (zero network by construction),
// other modes a real HTTP client.
struct ProviderBundle {
    std::shared_ptr<HttpTransport> transport;
    std::shared_ptr<NerProvider> ner;
    std::shared_ptr<EmbeddingProvider> embedding;
    std::unique_ptr<WikiClient> wiki;
    std::shared_ptr<LlmProvider> summarizer;
    std::shared_ptr<LlmProvider> classifier;
};

ProviderBundle make_providers(const PipelineConfig& cfg,
                              std::shared_ptr<HttpTransport> transport = nullptr);

// ingest -> extract -> retrieve -> materialize-context -> classify, with
// claim-level parallelism. Stage artifacts land in out_dir (entities.jsonl,
// kb.jsonl, contexts.jsonl, predictions.jsonl, manifest.json), ordered by
// claim id. Per-claim failures are recorded, never fatal; a replay cache
// miss or an all-claims failure is.
RunManifest run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_dir, ProviderBundle& providers);

// Convenience overload that builds the providers itself.
RunManifest run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_dir);

// Checks that every artifact referenced by a manifest exists under run_dir
// with a matching hash; returns problems found (empty = ok).
std::vector<std::string> verify_manifest(const nlohmann::json& manifest,
                                         const std::filesystem::path& run_dir);

// Bounded worker pool; fn(i) must handle its own per-item errors.
void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn);

} // namespace vericlaim
