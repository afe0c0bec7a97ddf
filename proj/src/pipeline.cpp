#include "vericlaim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <mutex>
#include <thread>

#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"

namespace vericlaim {

void PipelineConfig::validate() const {
    weights.validate();
    if (shots < 0) throw ConfigError("shots must be non-negative");
    if (shots > 0 && few_shot_train.empty()) {
        throw ConfigError("few-shot classification needs a train corpus (prompt.train_corpus)");
    }
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (mode == RunMode::replay && cache_root.empty()) {
        throw ConfigError("replay mode needs a cache root");
    }
    auto check_provider = [](const ProviderConfig& p, const std::string& slot,
                             std::initializer_list<const char*> kinds) {
        for (const char* k : kinds) {
            if (p.kind == k) return;
        }
        throw ConfigError("unsupported " + slot + " provider kind: " + p.kind);
    };
    check_provider(ner, "ner", {"http", "rule"});
    check_provider(embedding, "embedding", {"http", "hash"});
    check_provider(summarizer, "summarizer", {"http"});
    check_provider(classifier, "classifier", {"http"});
}

void PipelineConfig::defaults_self_check() {
    PipelineConfig defaults;
    if (defaults.weights.p != 5 || defaults.weights.alpha != 0.8 || defaults.weights.beta != 0.2 ||
        defaults.weights.theta != 0.5 || defaults.seed != 42) {
        throw ConfigError("configuration defaults drifted from the fixed parameter set");
    }
}

nlohmann::json PipelineConfig::snapshot() const {
    nlohmann::json providers = {
        {"ner", {{"kind", ner.kind}, {"model", ner.model}, {"endpoint", ner.endpoint}}},
        {"embedding",
         {{"kind", embedding.kind}, {"model", embedding.model}, {"endpoint", embedding.endpoint},
          {"dim", embedding.dim}}},
        {"summarizer",
         {{"kind", summarizer.kind}, {"model", summarizer.model}, {"endpoint", summarizer.endpoint}}},
        {"classifier",
         {{"kind", classifier.kind}, {"model", classifier.model}, {"endpoint", classifier.endpoint}}},
    };
    return {{"dataset", {{"profile", to_string(profile)}}},
            {"retrieval",
             {{"p", weights.p},
              {"alpha", weights.alpha},
              {"beta", weights.beta},
              {"theta", weights.theta},
              {"dedup_pages", dedup_pages}}},
            {"wiki", {{"api", wiki_api}}},
            {"providers", providers},
            {"context", {{"mode", to_string(context_mode)}}},
            {"prompt",
             {{"doubt_directive", doubt_directive},
              {"shots", shots},
              {"parse_default", to_string(parse_default)}}},
            // run mode stays out: a recorded run and its replay must produce
            // byte-identical manifests
            {"run", {{"seed", seed}}}};
}

namespace {

ProviderConfig parse_provider(const nlohmann::json& j, const ProviderConfig& base) {
    ProviderConfig p = base;
    if (j.contains("kind")) p.kind = j["kind"].get<std::string>();
    if (j.contains("endpoint")) p.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("model")) p.model = j["model"].get<std::string>();
    if (j.contains("rules")) p.rules_file = j["rules"].get<std::string>();
    if (j.contains("dim")) p.dim = j["dim"].get<size_t>();
    if (j.contains("rps")) p.rps = j["rps"].get<double>();
    if (j.contains("api_key_env")) p.api_key_env = j["api_key_env"].get<std::string>();
    return p;
}

} // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bad config " + path.string() + ": " + e.what());
    }
    PipelineConfig cfg;
    if (j.contains("dataset") && j["dataset"].contains("profile")) {
        cfg.profile = parse_dataset(j["dataset"]["profile"].get<std::string>());
    }
    if (j.contains("retrieval")) {
        const auto& r = j["retrieval"];
        if (r.contains("p")) cfg.weights.p = r["p"].get<int>();
        if (r.contains("alpha")) cfg.weights.alpha = r["alpha"].get<double>();
        if (r.contains("beta")) cfg.weights.beta = r["beta"].get<double>();
        if (r.contains("theta")) cfg.weights.theta = r["theta"].get<double>();
        if (r.contains("dedup_pages")) cfg.dedup_pages = r["dedup_pages"].get<bool>();
    }
    if (j.contains("wiki")) {
        const auto& w = j["wiki"];
        if (w.contains("api")) cfg.wiki_api = w["api"].get<std::string>();
        if (w.contains("rps")) cfg.wiki_rps = w["rps"].get<double>();
    }
    if (j.contains("providers")) {
        const auto& p = j["providers"];
        if (p.contains("ner")) cfg.ner = parse_provider(p["ner"], cfg.ner);
        if (p.contains("embedding")) cfg.embedding = parse_provider(p["embedding"], cfg.embedding);
        if (p.contains("summarizer")) cfg.summarizer = parse_provider(p["summarizer"], cfg.summarizer);
        if (p.contains("classifier")) cfg.classifier = parse_provider(p["classifier"], cfg.classifier);
    }
    if (j.contains("context") && j["context"].contains("mode")) {
        cfg.context_mode = parse_context_mode(j["context"]["mode"].get<std::string>());
    }
    if (j.contains("prompt")) {
        const auto& p = j["prompt"];
        if (p.contains("doubt_directive")) cfg.doubt_directive = p["doubt_directive"].get<bool>();
        if (p.contains("shots")) cfg.shots = p["shots"].get<int>();
        if (p.contains("train_corpus")) cfg.few_shot_train = p["train_corpus"].get<std::string>();
        if (p.contains("parse_default")) {
            cfg.parse_default = parse_label_token(p["parse_default"].get<std::string>());
        }
    }
    if (j.contains("cache") && j["cache"].contains("root")) {
        cfg.cache_root = j["cache"]["root"].get<std::string>();
    }
    if (j.contains("run")) {
        const auto& r = j["run"];
        if (r.contains("mode")) cfg.mode = parse_run_mode(r["mode"].get<std::string>());
        if (r.contains("seed")) cfg.seed = r["seed"].get<uint64_t>();
        if (r.contains("workers")) cfg.workers = r["workers"].get<int>();
        if (r.contains("manifest_timestamps")) {
            cfg.manifest_timestamps = r["manifest_timestamps"].get<bool>();
        }
    }
    return cfg;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j = {{"schema", "vericlaim-run/v1"},
                        {"config", config},
                        {"corpus_sha256", corpus_sha256},
                        {"claim_count", claim_count},
                        {"providers", providers}};
    auto& artifacts_json = j["artifacts"] = nlohmann::json::array();
    for (const auto& a : artifacts) {
        artifacts_json.push_back({{"name", a.name}, {"path", a.path}, {"sha256", a.sha256}});
    }
    auto& failures_json = j["failures"] = nlohmann::json::array();
    for (const auto& f : failures) {
        failures_json.push_back(
            {{"claim_id", f.claim_id}, {"stage", f.stage}, {"error", f.message}});
    }
    if (started_at) j["started_at"] = *started_at;
    return j;
}

ProviderBundle make_providers(const PipelineConfig& cfg, std::shared_ptr<HttpTransport> transport) {
    ProviderBundle bundle;
    if (transport) {
        bundle.transport = std::move(transport);
    } else if (cfg.mode == RunMode::replay) {
        bundle.transport = std::make_shared<NullTransport>();
    } else {
        bundle.transport = std::make_shared<HttplibTransport>();
    }
    ResponseCache cache =
        cfg.cache_root.empty() ? ResponseCache() : ResponseCache(cfg.cache_root);
    // Replay never talks to the network; do not demand credentials for it.
    auto creds = [&](const std::string& env_var) {
        return cfg.mode == RunMode::replay ? HttpHeaders{} : auth_headers_from_env(env_var);
    };

    auto wiki_limiter = std::make_shared<RateLimiter>(cfg.wiki_rps);
    bundle.wiki = std::make_unique<WikiClient>(bundle.transport, cfg.wiki_api, cache, cfg.mode,
                                               wiki_limiter);

    if (cfg.ner.kind == "rule") {
        bundle.ner = std::make_shared<RuleNerProvider>(cfg.ner.rules_file);
    } else {
        bundle.ner = std::make_shared<HttpNerProvider>(
            bundle.transport, cfg.ner.endpoint, cfg.ner.model, cache, cfg.mode,
            std::make_shared<RateLimiter>(cfg.ner.rps), RetryPolicy{},
            creds(cfg.ner.api_key_env));
    }

    if (cfg.embedding.kind == "hash") {
        bundle.embedding = std::make_shared<HashEmbeddingProvider>(cfg.embedding.dim);
    } else {
        auto http = std::make_shared<HttpEmbeddingProvider>(
            bundle.transport, cfg.embedding.endpoint, cfg.embedding.model,
            std::make_shared<RateLimiter>(cfg.embedding.rps), RetryPolicy{},
            creds(cfg.embedding.api_key_env));
        bundle.embedding = std::make_shared<CachingEmbeddingProvider>(http, cache, cfg.mode);
    }

    auto make_llm = [&](const ProviderConfig& p) -> std::shared_ptr<LlmProvider> {
        // The inner provider is never invoked in replay mode, but it still
        // supplies the model tag the cache keys were recorded under.
        auto inner = std::make_shared<HttpLlmProvider>(bundle.transport, p.endpoint, p.model,
                                                       std::make_shared<RateLimiter>(p.rps),
                                                       RetryPolicy{},
                                                       creds(p.api_key_env));
        return std::make_shared<CachingLlmProvider>(inner, cache, cfg.mode);
    };
    bundle.summarizer = make_llm(cfg.summarizer);
    bundle.classifier = make_llm(cfg.classifier);
    return bundle;
}

void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn) {
    size_t pool_size = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(workers), count));
    if (pool_size <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(pool_size);
    for (size_t w = 0; w < pool_size; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct ClaimState {
    std::vector<Entity> entities;
    KnowledgeBase kb;
    ContextSummary context;
    std::optional<Prediction> prediction;
    std::optional<ClaimFailure> failure;
};

std::string iso_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

RunManifest run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_dir, ProviderBundle& providers) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    auto claims = read_canonical_corpus(corpus_path);
    if (claims.empty()) throw IoError("empty corpus: " + corpus_path.string());
    std::sort(claims.begin(), claims.end(),
              [](const Claim& a, const Claim& b) { return a.id < b.id; });

    RunManifest manifest;
    manifest.config = cfg.snapshot();
    manifest.corpus_sha256 = sha256_of_file(corpus_path);
    manifest.claim_count = claims.size();
    if (cfg.manifest_timestamps) manifest.started_at = iso_timestamp_now();

    std::optional<DiseaseLexicon> lexicon;
    if (cfg.profile == Dataset::CT22) lexicon = DiseaseLexicon::ct22_default();

    PromptConfig prompt_cfg;
    prompt_cfg.augmented = cfg.context_mode != ContextMode::none;
    prompt_cfg.doubt_directive = cfg.doubt_directive;
    prompt_cfg.parse_default = cfg.parse_default;
    if (cfg.shots > 0) {
        auto train = read_canonical_corpus(cfg.few_shot_train);
        prompt_cfg.shots = sample_few_shot(train, cfg.seed);
        if (static_cast<size_t>(cfg.shots) != prompt_cfg.shots.size()) {
            throw ConfigError("only 3-shot demonstrations are supported");
        }
    }

    const bool retrieval_needed = cfg.context_mode != ContextMode::none;
    std::vector<ClaimState> states(claims.size());
    std::mutex replay_miss_mutex;
    std::exception_ptr replay_miss;

    parallel_for(claims.size(), cfg.workers, [&](size_t i) {
        const Claim& claim = claims[i];
        ClaimState& state = states[i];
        state.kb.claim_id = claim.id;
        auto fail = [&](const std::string& stage, const std::exception& e) {
            state.failure = ClaimFailure{claim.id, stage, e.what()};
        };
        try {
            if (retrieval_needed) {
                state.entities = extract_entities(claim, *providers.ner, lexicon);
                state.kb = build_knowledge_base(claim, state.entities, *providers.wiki,
                                                *providers.embedding, cfg.weights,
                                                cfg.dedup_pages);
            }
            state.context = materialize_context(claim, state.kb, cfg.context_mode,
                                                providers.summarizer.get());
            state.prediction = classify(claim, &state.context, prompt_cfg, *providers.classifier);
        } catch (const CacheMissError&) {
            std::lock_guard<std::mutex> lock(replay_miss_mutex);
            if (!replay_miss) replay_miss = std::current_exception();
        } catch (const std::exception& e) {
            fail("pipeline", e);
        }
    });
    if (replay_miss) std::rethrow_exception(replay_miss);

    size_t succeeded = 0;
    for (const auto& s : states) {
        if (s.failure) manifest.failures.push_back(*s.failure);
        else ++succeeded;
    }
    if (succeeded == 0) throw Error("pipeline failed for every claim");

    auto add_artifact = [&](const std::string& name, const std::string& filename,
                            const std::vector<nlohmann::json>& rows) {
        auto path = out_dir / filename;
        write_jsonl(path, rows);
        manifest.artifacts.push_back({name, filename, sha256_of_file(path)});
    };

    if (retrieval_needed) {
        std::vector<nlohmann::json> entity_rows, kb_rows;
        for (size_t i = 0; i < claims.size(); ++i) {
            if (states[i].failure) continue;
            entity_rows.push_back(
                {{"claim_id", claims[i].id}, {"entities", states[i].entities}});
            kb_rows.push_back(states[i].kb);
        }
        add_artifact("entities", "entities.jsonl", entity_rows);
        add_artifact("knowledge_bases", "kb.jsonl", kb_rows);
    }

    std::vector<nlohmann::json> context_rows, prediction_rows;
    for (size_t i = 0; i < claims.size(); ++i) {
        if (states[i].failure) continue;
        context_rows.push_back(states[i].context);
        prediction_rows.push_back(*states[i].prediction);
    }
    add_artifact("contexts", "contexts.jsonl", context_rows);
    add_artifact("predictions", "predictions.jsonl", prediction_rows);

    manifest.providers = {{"ner", providers.ner->id()},
                          {"embedding", providers.embedding->id()},
                          {"summarizer", providers.summarizer->id()},
                          {"classifier", providers.classifier->id()}};

    atomic_write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    return manifest;
}

RunManifest run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& corpus_path,
                         const std::filesystem::path& out_dir) {
    auto providers = make_providers(cfg);
    return run_pipeline(cfg, corpus_path, out_dir, providers);
}

std::vector<std::string> verify_manifest(const nlohmann::json& manifest,
                                         const std::filesystem::path& run_dir) {
    std::vector<std::string> problems;
    if (!manifest.contains("artifacts")) {
        problems.push_back("manifest has no artifact list");
        return problems;
    }
    for (const auto& a : manifest["artifacts"]) {
        auto rel = a.at("path").get<std::string>();
        auto path = run_dir / rel;
        if (!std::filesystem::exists(path)) {
            problems.push_back("missing artifact: " + rel);
            continue;
        }
        auto actual = sha256_of_file(path);
        if (actual != a.at("sha256").get<std::string>()) {
            problems.push_back("hash mismatch for " + rel);
        }
    }
    return problems;
}

} // namespace vericlaim
