// vericlaim: claim corpora in, verifiability verdicts and reports out.
//
// Subcommands mirror the pipeline stages (ingest/extract/retrieve/context/
// classify), the evaluation suite (evaluate/compare/ablate/agreement) and the
// end-to-end driver (run). Exit codes: 0 success, 1 operational error,
// 2 usage error.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vericlaim/corpus.hpp"
#include "vericlaim/detect.hpp"
#include "vericlaim/errors.hpp"
#include "vericlaim/eval.hpp"
#include "vericlaim/json_io.hpp"
#include "vericlaim/pipeline.hpp"
#include "vericlaim/summarize.hpp"
#include "vericlaim/wiki.hpp"

namespace vc = vericlaim;
using nlohmann::json;

namespace {

// Config file values sit between defaults and explicit flags; flags win.
struct ConfigCli {
    std::string config_path;

    std::optional<std::string> profile, run_mode, context_mode, cache_root, wiki_api;
    std::optional<int> p, shots, workers;
    std::optional<double> alpha, beta, theta, wiki_rps;
    std::optional<bool> dedup_pages, doubt_directive, manifest_timestamps;
    std::optional<uint64_t> seed;
    std::optional<std::string> train_corpus, parse_default;

    std::optional<std::string> ner_kind, ner_endpoint, ner_model, ner_rules, ner_key_env;
    std::optional<std::string> embed_kind, embed_endpoint, embed_model, embed_key_env;
    std::optional<size_t> embed_dim;
    std::optional<std::string> sum_endpoint, sum_model, sum_key_env;
    std::optional<std::string> cls_endpoint, cls_model, cls_key_env;
    std::optional<double> ner_rps, embed_rps, sum_rps, cls_rps;

    void register_flags(CLI::App* cmd) {
        // repeated flags compose scripts; the last occurrence wins
        cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        cmd->add_option("--config", config_path, "pipeline config JSON");
        cmd->add_option("--profile", profile, "dataset profile: CT22|PoliClaim|Custom");
        cmd->add_option("--run-mode", run_mode, "live|record|replay");
        cmd->add_option("--cache-root", cache_root, "response cache directory");
        cmd->add_option("--wiki-api", wiki_api, "MediaWiki api.php base URL");
        cmd->add_option("--wiki-rps", wiki_rps, "wiki requests per second");
        cmd->add_option("--p", p, "candidate extracts per query");
        cmd->add_option("--alpha", alpha, "extract-similarity weight");
        cmd->add_option("--beta", beta, "title-similarity weight");
        cmd->add_option("--theta", theta, "type-filter threshold");
        cmd->add_option("--dedup-pages", dedup_pages, "drop duplicate pages across entities");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--workers", workers, "claim-level worker threads");
        cmd->add_option("--manifest-timestamps", manifest_timestamps,
                        "include wall-clock timestamps in manifests");
        cmd->add_option("--ner-kind", ner_kind, "ner provider kind: http|rule");
        cmd->add_option("--ner-endpoint", ner_endpoint, "ner provider URL");
        cmd->add_option("--ner-model", ner_model, "ner model tag");
        cmd->add_option("--ner-rules", ner_rules, "rule file for the offline ner stub");
        cmd->add_option("--embed-kind", embed_kind, "embedding provider kind: http|hash");
        cmd->add_option("--embed-endpoint", embed_endpoint, "embedding provider URL");
        cmd->add_option("--embed-model", embed_model, "embedding model tag");
        cmd->add_option("--embed-dim", embed_dim, "hash embedder dimension");
        cmd->add_option("--ner-rps", ner_rps, "NER requests per second");
        cmd->add_option("--embed-rps", embed_rps, "embedding requests per second");
        cmd->add_option("--summarizer-rps", sum_rps, "summarizer requests per second");
        cmd->add_option("--classifier-rps", cls_rps, "classifier requests per second");
        cmd->add_option("--ner-api-key-env", ner_key_env, "env var with the NER bearer token");
        cmd->add_option("--embed-api-key-env", embed_key_env,
                        "env var with the embedding bearer token");
        cmd->add_option("--summarizer-endpoint", sum_endpoint, "summarizer URL");
        cmd->add_option("--summarizer-model", sum_model, "summarizer model tag");
        cmd->add_option("--summarizer-api-key-env", sum_key_env,
                        "env var with the summarizer bearer token");
        cmd->add_option("--classifier-endpoint", cls_endpoint, "classifier URL");
        cmd->add_option("--classifier-model", cls_model, "classifier model tag");
        cmd->add_option("--classifier-api-key-env", cls_key_env,
                        "env var with the classifier bearer token");
        cmd->add_option("--shots", shots, "few-shot demonstrations (0 or 3)");
        cmd->add_option("--train", train_corpus, "canonical train corpus for few-shot sampling");
        cmd->add_option("--parse-default", parse_default,
                        "label when no yes/no token parses (default verifiable)");
        cmd->add_flag_callback(
            "--no-doubt-directive", [this] { doubt_directive = false; },
            "drop the doubt sentence from the prompt");
        cmd->add_flag_callback(
            "--doubt-directive", [this] { doubt_directive = true; },
            "keep the doubt sentence in the prompt (default)");
    }

    vc::PipelineConfig resolve() const {
        vc::PipelineConfig cfg;
        if (!config_path.empty()) cfg = vc::load_pipeline_config(config_path);
        if (profile) cfg.profile = vc::parse_dataset(*profile);
        if (run_mode) cfg.mode = vc::parse_run_mode(*run_mode);
        if (context_mode) cfg.context_mode = vc::parse_context_mode(*context_mode);
        if (cache_root) cfg.cache_root = *cache_root;
        if (wiki_api) cfg.wiki_api = *wiki_api;
        if (wiki_rps) cfg.wiki_rps = *wiki_rps;
        if (p) cfg.weights.p = *p;
        if (alpha) cfg.weights.alpha = *alpha;
        if (beta) cfg.weights.beta = *beta;
        if (theta) cfg.weights.theta = *theta;
        if (dedup_pages) cfg.dedup_pages = *dedup_pages;
        if (seed) cfg.seed = *seed;
        if (workers) cfg.workers = *workers;
        if (manifest_timestamps) cfg.manifest_timestamps = *manifest_timestamps;
        if (ner_kind) cfg.ner.kind = *ner_kind;
        if (ner_endpoint) cfg.ner.endpoint = *ner_endpoint;
        if (ner_model) cfg.ner.model = *ner_model;
        if (ner_rules) {
            cfg.ner.rules_file = *ner_rules;
            if (!ner_kind) cfg.ner.kind = "rule";
        }
        if (embed_kind) cfg.embedding.kind = *embed_kind;
        if (embed_endpoint) cfg.embedding.endpoint = *embed_endpoint;
        if (embed_model) cfg.embedding.model = *embed_model;
        if (embed_dim) cfg.embedding.dim = *embed_dim;
        if (ner_rps) cfg.ner.rps = *ner_rps;
        if (embed_rps) cfg.embedding.rps = *embed_rps;
        if (sum_rps) cfg.summarizer.rps = *sum_rps;
        if (cls_rps) cfg.classifier.rps = *cls_rps;
        if (ner_key_env) cfg.ner.api_key_env = *ner_key_env;
        if (embed_key_env) cfg.embedding.api_key_env = *embed_key_env;
        if (sum_endpoint) cfg.summarizer.endpoint = *sum_endpoint;
        if (sum_model) cfg.summarizer.model = *sum_model;
        if (sum_key_env) cfg.summarizer.api_key_env = *sum_key_env;
        if (cls_endpoint) cfg.classifier.endpoint = *cls_endpoint;
        if (cls_model) cfg.classifier.model = *cls_model;
        if (cls_key_env) cfg.classifier.api_key_env = *cls_key_env;
        if (shots) cfg.shots = *shots;
        if (train_corpus) cfg.few_shot_train = *train_corpus;
        if (parse_default) cfg.parse_default = vc::parse_label_token(*parse_default);
        if (doubt_directive) cfg.doubt_directive = *doubt_directive;
        return cfg;
    }
};

void print_or_dump(const json& report, bool as_json, const std::function<void()>& render_text) {
    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        render_text();
    }
}

std::string pct(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", ratio * 100.0);
    return buf;
}

std::vector<std::pair<vc::Claim, vc::Label>> load_shots(const std::string& train_path, int shots,
                                                        uint64_t seed) {
    if (shots == 0) return {};
    if (shots != 3) throw vc::ConfigError("shots must be 0 or 3");
    if (train_path.empty()) throw vc::ConfigError("--shots needs --train");
    auto train = vc::read_canonical_corpus(train_path);
    return vc::sample_few_shot(train, seed);
}

int cmd_ingest(const std::string& input, const std::string& manifest, const std::string& format,
               const std::string& dataset, const std::string& split, const std::string& text_col,
               const std::string& label_col, const std::string& id_col, std::string delimiter,
               const std::string& out, bool stats, bool as_json) {
    vc::LoadResult result;
    if (!manifest.empty()) {
        result = vc::load_dataset_manifest(manifest);
    } else {
        if (input.empty()) throw vc::ConfigError("ingest needs --input or --manifest");
        vc::LoadOptions options;
        options.format = vc::parse_corpus_format(format);
        options.dataset = vc::parse_dataset(dataset);
        options.split = vc::parse_split(split);
        options.schema.text_column = text_col;
        options.schema.label_column = label_col;
        options.schema.id_column = id_col;
        if (!delimiter.empty()) options.delimiter = delimiter == "\\t" ? '\t' : delimiter[0];
        result = vc::load_corpus(input, options);
    }
    for (const auto& err : result.errors) {
        std::cerr << "row " << err.line << ": " << err.message << "\n";
    }
    if (!out.empty()) vc::write_canonical_corpus(out, result.claims);
    json report = {{"claims", result.claims.size()}, {"malformed_rows", result.errors.size()}};
    if (stats) report["stats"] = vc::to_json_report(vc::corpus_stats(result.claims));
    print_or_dump(report, as_json, [&] {
        std::cout << "ingested " << result.claims.size() << " claims ("
                  << result.errors.size() << " malformed rows)\n";
        if (stats) {
            auto cs = vc::corpus_stats(result.claims);
            for (const auto& [split, st] : cs.by_split) {
                std::cout << "  " << vc::to_string(split) << ": " << st.total << " claims";
                if (st.verifiable_fraction) {
                    std::cout << ", " << st.verifiable << " verifiable ("
                              << pct(*st.verifiable_fraction) << "%)";
                }
                std::cout << "\n";
            }
        }
    });
    return 0;
}

int cmd_extract(const ConfigCli& cli, const std::string& corpus, const std::string& out) {
    auto cfg = cli.resolve();
    auto providers = vc::make_providers(cfg);
    auto claims = vc::read_canonical_corpus(corpus);
    std::sort(claims.begin(), claims.end(),
              [](const vc::Claim& a, const vc::Claim& b) { return a.id < b.id; });
    std::optional<vc::DiseaseLexicon> lexicon;
    if (cfg.profile == vc::Dataset::CT22) lexicon = vc::DiseaseLexicon::ct22_default();

    std::vector<json> rows(claims.size());
    vc::parallel_for(claims.size(), cfg.workers, [&](size_t i) {
        auto entities = vc::extract_entities(claims[i], *providers.ner, lexicon);
        rows[i] = {{"claim_id", claims[i].id}, {"entities", entities}};
    });
    vc::write_jsonl(out, rows);
    std::cout << "wrote " << rows.size() << " entity records to " << out << "\n";
    return 0;
}

int cmd_retrieve(const ConfigCli& cli, const std::string& corpus, const std::string& entities_path,
                 const std::string& out) {
    auto cfg = cli.resolve();
    auto providers = vc::make_providers(cfg);
    auto claims = vc::read_canonical_corpus(corpus);
    std::sort(claims.begin(), claims.end(),
              [](const vc::Claim& a, const vc::Claim& b) { return a.id < b.id; });

    std::map<std::string, std::vector<vc::Entity>> entity_map;
    for (const auto& row : vc::read_jsonl(entities_path)) {
        entity_map[row.at("claim_id").get<std::string>()] =
            row.at("entities").get<std::vector<vc::Entity>>();
    }
    std::vector<json> rows(claims.size());
    vc::parallel_for(claims.size(), cfg.workers, [&](size_t i) {
        auto it = entity_map.find(claims[i].id);
        const std::vector<vc::Entity> empty;
        auto kb = vc::build_knowledge_base(claims[i], it == entity_map.end() ? empty : it->second,
                                           *providers.wiki, *providers.embedding, cfg.weights,
                                           cfg.dedup_pages);
        rows[i] = kb;
    });
    vc::write_jsonl(out, rows);
    std::cout << "wrote " << rows.size() << " knowledge bases to " << out << "\n";
    return 0;
}

int cmd_context(const ConfigCli& cli, const std::string& corpus, const std::string& kb_path,
                const std::string& mode, const std::string& out) {
    auto cfg = cli.resolve();
    cfg.context_mode = vc::parse_context_mode(mode);
    auto providers = vc::make_providers(cfg);
    auto claims = vc::read_canonical_corpus(corpus);
    std::sort(claims.begin(), claims.end(),
              [](const vc::Claim& a, const vc::Claim& b) { return a.id < b.id; });

    std::map<std::string, vc::KnowledgeBase> kb_map;
    if (!kb_path.empty()) {
        for (const auto& row : vc::read_jsonl(kb_path)) {
            auto kb = row.get<vc::KnowledgeBase>();
            kb_map[kb.claim_id] = std::move(kb);
        }
    } else if (cfg.context_mode != vc::ContextMode::none) {
        throw vc::ConfigError("context modes raw/summary need --kb");
    }
    std::vector<json> rows(claims.size());
    vc::parallel_for(claims.size(), cfg.workers, [&](size_t i) {
        vc::KnowledgeBase kb;
        kb.claim_id = claims[i].id;
        if (auto it = kb_map.find(claims[i].id); it != kb_map.end()) kb = it->second;
        rows[i] = vc::materialize_context(claims[i], kb, cfg.context_mode,
                                          providers.summarizer.get());
    });
    vc::write_jsonl(out, rows);
    std::cout << "wrote " << rows.size() << " contexts to " << out << "\n";
    return 0;
}

int cmd_classify(const ConfigCli& cli, const std::string& corpus, const std::string& contexts_path,
                 const std::string& mode, const std::string& out) {
    auto cfg = cli.resolve();
    cfg.context_mode = vc::parse_context_mode(mode);
    auto providers = vc::make_providers(cfg);
    auto claims = vc::read_canonical_corpus(corpus);
    std::sort(claims.begin(), claims.end(),
              [](const vc::Claim& a, const vc::Claim& b) { return a.id < b.id; });

    std::map<std::string, vc::ContextSummary> context_map;
    if (!contexts_path.empty()) {
        for (const auto& row : vc::read_jsonl(contexts_path)) {
            auto ctx = row.get<vc::ContextSummary>();
            context_map[ctx.claim_id] = std::move(ctx);
        }
    } else if (cfg.context_mode != vc::ContextMode::none) {
        throw vc::ConfigError("context modes raw/summary need --contexts");
    }

    vc::PromptConfig prompt_cfg;
    prompt_cfg.augmented = cfg.context_mode != vc::ContextMode::none;
    prompt_cfg.doubt_directive = cfg.doubt_directive;
    prompt_cfg.parse_default = cfg.parse_default;
    prompt_cfg.shots = load_shots(cfg.few_shot_train.string(), cfg.shots, cfg.seed);

    std::vector<vc::Prediction> preds(claims.size());
    vc::parallel_for(claims.size(), cfg.workers, [&](size_t i) {
        vc::ContextSummary sentinel;
        sentinel.claim_id = claims[i].id;
        sentinel.text = vc::kNoContextSentinel;
        sentinel.generator_id = "none";
        sentinel.source_mode = vc::ContextMode::none;
        const vc::ContextSummary* ctx = nullptr;
        if (prompt_cfg.augmented) {
            auto it = context_map.find(claims[i].id);
            ctx = it != context_map.end() ? &it->second : &sentinel;
        }
        preds[i] = vc::classify(claims[i], ctx, prompt_cfg, *providers.classifier);
    });
    vc::write_predictions(out, preds);
    std::cout << "wrote " << preds.size() << " predictions to " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& preds_path, const std::string& gold_path, bool macro,
                 bool as_json) {
    auto preds = vc::read_predictions(preds_path);
    auto gold = vc::read_canonical_corpus(gold_path);
    auto cm = vc::confusion(preds, gold);
    auto m = vc::metrics(cm);
    auto e = vc::error_distribution(cm);
    double f1_macro = vc::macro_f1(cm);
    json report = {{"confusion", {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}}},
                   {"metrics", vc::to_json_report(m)},
                   {"errors", vc::to_json_report(e)}};
    report["metrics"]["macro_f1"] = f1_macro;
    report["metrics"]["macro_f1_pct"] = vc::round_to(f1_macro * 100.0, 2);
    print_or_dump(report, as_json, [&] {
        std::cout << "n=" << cm.total() << "  tp=" << cm.tp << " fp=" << cm.fp << " fn=" << cm.fn
                  << " tn=" << cm.tn << "\n";
        std::cout << "accuracy " << pct(m.accuracy) << "  precision " << pct(m.precision)
                  << "  recall " << pct(m.recall) << "  f1 "
                  << (macro ? pct(f1_macro) + " (macro)" : pct(m.f1)) << "\n";
        std::cout << "errors: fp " << e.fp << " (" << vc::round_to(e.fp_share * 100.0, 1)
                  << "%), fn " << e.fn << " (" << vc::round_to(e.fn_share * 100.0, 1)
                  << "%), total " << e.total_errors << " ("
                  << vc::round_to(e.total_share * 100.0, 1) << "%)";
        if (e.fp_fn_ratio) std::cout << ", fp/fn " << vc::round_to(*e.fp_fn_ratio, 2);
        std::cout << "\n";
    });
    return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& system_path,
                const std::string& gold_path, bool as_json) {
    auto baseline = vc::read_predictions(baseline_path);
    auto system = vc::read_predictions(system_path);
    auto gold = vc::read_canonical_corpus(gold_path);
    auto report = vc::transitions(baseline, system, gold);
    print_or_dump(vc::to_json_report(report), as_json, [&] {
        std::cout << "n=" << report.n << "\n";
        std::cout << "fixed " << report.fixed << "  regressed " << report.regressed
                  << "  both_right " << report.both_right << "  both_wrong " << report.both_wrong
                  << "\n";
        std::cout << "net fp " << (report.net_fp_delta >= 0 ? "+" : "") << report.net_fp_delta
                  << ", net fn " << (report.net_fn_delta >= 0 ? "+" : "") << report.net_fn_delta
                  << "\n";
    });
    return 0;
}

int cmd_ablate(const std::string& original_path, const std::string& ablation_path,
               const std::string& gold_path, double threshold, bool as_json) {
    auto gold = vc::read_canonical_corpus(gold_path);
    auto original = vc::metrics(vc::confusion(vc::read_predictions(original_path), gold));
    auto ablation = vc::metrics(vc::confusion(vc::read_predictions(ablation_path), gold));
    auto deltas = vc::delta_table(original, ablation, threshold);
    json report = {{"threshold", threshold},
                   {"original", vc::to_json_report(original)},
                   {"ablation", vc::to_json_report(ablation)},
                   {"deltas", vc::to_json_report(deltas)}};
    print_or_dump(report, as_json, [&] {
        std::cout << "delta = ablation - original, percentage points (flag when |delta| > "
                  << threshold << ")\n";
        for (const auto& d : deltas) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%-10s %+7.2f %s", d.metric.c_str(), d.delta,
                          d.flagged ? "*" : "");
            std::cout << "  " << buf << "\n";
        }
    });
    return 0;
}

int cmd_agreement(const std::string& ratings_path, const std::string& compare_path, bool as_json) {
    auto tables = vc::read_ratings_csv(ratings_path);
    json report;
    double kappa_sum = 0.0;
    size_t kappa_count = 0;
    for (const auto& [dimension, table] : tables) {
        table.validate();
        json entry = {{"items", table.items()},
                      {"raters", table.raters()},
                      {"mean_rating", vc::round_to(table.mean(), 2)}};
        try {
            double kappa = vc::fleiss_kappa(table);
            entry["fleiss_kappa"] = vc::round_to(kappa, 4);
            kappa_sum += kappa;
            ++kappa_count;
        } catch (const vc::DegenerateStatistic& e) {
            entry["fleiss_kappa"] = nullptr;
            entry["note"] = e.what();
        }
        report["dimensions"][dimension] = entry;
    }
    if (kappa_count > 0) {
        report["average_kappa"] = vc::round_to(kappa_sum / static_cast<double>(kappa_count), 4);
    }
    if (!compare_path.empty()) {
        auto other = vc::read_ratings_csv(compare_path);
        for (const auto& [dimension, table] : tables) {
            auto it = other.find(dimension);
            if (it == other.end()) continue;
            if (table.item_ids != it->second.item_ids) {
                throw vc::ConfigError("ratings files disagree on items for dimension " + dimension);
            }
            json entry;
            try {
                auto t = vc::paired_t_test(table.item_means(), it->second.item_means());
                entry = {{"t", vc::round_to(t.t, 4)}, {"p", vc::round_to(t.p, 4)}, {"dof", t.dof}};
            } catch (const vc::DegenerateStatistic& e) {
                entry = {{"t", nullptr}, {"p", nullptr}, {"note", e.what()}};
            }
            report["paired_t"][dimension] = entry;
        }
    }
    print_or_dump(report, as_json, [&] {
        for (const auto& [dimension, entry] : report["dimensions"].items()) {
            std::cout << dimension << ": mean " << entry["mean_rating"] << ", fleiss kappa ";
            if (entry["fleiss_kappa"].is_null()) {
                std::cout << "undefined (" << entry.value("note", "degenerate") << ")";
            } else {
                std::cout << entry["fleiss_kappa"];
            }
            std::cout << "\n";
        }
        if (report.contains("average_kappa")) {
            std::cout << "average kappa: " << report["average_kappa"] << "\n";
        }
        if (report.contains("paired_t")) {
            for (const auto& [dimension, entry] : report["paired_t"].items()) {
                std::cout << "paired t (" << dimension << "): ";
                if (entry["t"].is_null()) {
                    std::cout << entry.value("note", "degenerate") << "\n";
                } else {
                    std::cout << "t=" << entry["t"] << ", p=" << entry["p"] << "\n";
                }
            }
        }
    });
    return 0;
}

int cmd_run(const ConfigCli& cli, const std::string& corpus, const std::string& out_dir,
            bool as_json) {
    auto cfg = cli.resolve();
    auto manifest = vc::run_pipeline(cfg, corpus, out_dir);
    for (const auto& f : manifest.failures) {
        std::cerr << "claim " << f.claim_id << " failed in " << f.stage << ": " << f.message
                  << "\n";
    }
    print_or_dump(manifest.to_json(), as_json, [&] {
        std::cout << "run complete: " << manifest.claim_count << " claims, "
                  << manifest.failures.size() << " failures, " << manifest.artifacts.size()
                  << " artifacts in " << out_dir << "\n";
    });
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    vc::PipelineConfig::defaults_self_check();

    CLI::App app{"context-driven verifiable claim detection pipeline"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable JSON output");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load a raw corpus into canonical JSON-lines");
    std::string in_input, in_manifest, in_format = "delimited", in_dataset = "Custom";
    std::string in_split = "train", in_text = "text", in_label = "label", in_id, in_delim, in_out;
    bool in_stats = false;
    ingest->add_option("--input", in_input, "delimited or JSON-lines corpus file");
    ingest->add_option("--manifest", in_manifest, "dataset manifest JSON");
    ingest->add_option("--format", in_format, "delimited|jsonl");
    ingest->add_option("--dataset", in_dataset, "CT22|PoliClaim|Custom");
    ingest->add_option("--split", in_split, "train|dev|test");
    ingest->add_option("--text-col", in_text, "text column name");
    ingest->add_option("--label-col", in_label, "label column name (empty: unlabeled)");
    ingest->add_option("--id-col", in_id, "id column name (empty: synthesize)");
    ingest->add_option("--delimiter", in_delim, "field delimiter (default from extension)");
    ingest->add_option("--out", in_out, "canonical corpus output path");
    ingest->add_flag("--stats", in_stats, "include corpus statistics");

    // extract
    auto* extract = app.add_subcommand("extract", "extract entities per claim");
    ConfigCli extract_cfg;
    std::string ex_corpus, ex_out;
    extract_cfg.register_flags(extract);
    extract->add_option("--corpus", ex_corpus, "canonical corpus")->required();
    extract->add_option("--out", ex_out, "entities JSON-lines output")->required();

    // retrieve
    auto* retrieve = app.add_subcommand("retrieve", "build knowledge bases from Wikipedia");
    ConfigCli retrieve_cfg;
    std::string re_corpus, re_entities, re_out;
    retrieve_cfg.register_flags(retrieve);
    retrieve->add_option("--corpus", re_corpus, "canonical corpus")->required();
    retrieve->add_option("--entities", re_entities, "entities JSON-lines")->required();
    retrieve->add_option("--out", re_out, "knowledge-base JSON-lines output")->required();

    // context
    auto* context = app.add_subcommand("context", "materialize claim contexts");
    ConfigCli context_cfg;
    std::string cx_corpus, cx_kb, cx_mode = "summary", cx_out;
    context_cfg.register_flags(context);
    context->add_option("--corpus", cx_corpus, "canonical corpus")->required();
    context->add_option("--kb", cx_kb, "knowledge-base JSON-lines");
    context->add_option("--mode", cx_mode, "none|raw|summary");
    context->add_option("--out", cx_out, "contexts JSON-lines output")->required();

    // classify
    auto* classify = app.add_subcommand("classify", "classify verifiability via prompting");
    ConfigCli classify_cfg;
    std::string cl_corpus, cl_contexts, cl_mode = "none", cl_out;
    classify_cfg.register_flags(classify);
    classify->add_option("--corpus", cl_corpus, "canonical corpus")->required();
    classify->add_option("--contexts", cl_contexts, "contexts JSON-lines");
    classify->add_option("--mode", cl_mode, "none|raw|summary (none = baseline prompt)");
    classify->add_option("--out", cl_out, "predictions JSON-lines output")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "metrics and error distribution");
    std::string ev_preds, ev_gold;
    bool ev_macro = false;
    evaluate->add_option("--preds", ev_preds, "predictions JSON-lines")->required();
    evaluate->add_option("--gold", ev_gold, "canonical gold corpus")->required();
    evaluate->add_flag("--macro-f1", ev_macro,
                       "report macro-averaged F1 as the headline score");

    // compare
    auto* compare = app.add_subcommand("compare", "per-sample transition analysis");
    std::string cp_baseline, cp_system, cp_gold;
    compare->add_option("--baseline", cp_baseline, "baseline predictions")->required();
    compare->add_option("--system", cp_system, "system predictions")->required();
    compare->add_option("--gold", cp_gold, "canonical gold corpus")->required();

    // ablate
    auto* ablate = app.add_subcommand("ablate", "metric deltas between two prediction files");
    std::string ab_original, ab_ablation, ab_gold;
    double ab_threshold = 3.5;
    ablate->add_option("--original", ab_original, "original predictions")->required();
    ablate->add_option("--ablation", ab_ablation, "ablated predictions")->required();
    ablate->add_option("--gold", ab_gold, "canonical gold corpus")->required();
    ablate->add_option("--threshold", ab_threshold, "flag |delta| above this (percentage points)");

    // agreement
    auto* agreement = app.add_subcommand("agreement", "inter-annotator statistics");
    std::string ag_ratings, ag_compare;
    agreement->add_option("--ratings", ag_ratings, "ratings CSV")->required();
    agreement->add_option("--compare", ag_compare, "second ratings CSV for the paired t-test");

    // run
    auto* run = app.add_subcommand("run", "full pipeline: ingest through classify");
    ConfigCli run_cfg;
    std::string rn_corpus, rn_out;
    run_cfg.register_flags(run);
    run->add_option("--context-mode", run_cfg.context_mode, "none|raw|summary");
    run->add_option("--corpus", rn_corpus, "canonical corpus")->required();
    run->add_option("--out", rn_out, "run output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            return cmd_ingest(in_input, in_manifest, in_format, in_dataset, in_split, in_text,
                              in_label, in_id, in_delim, in_out, in_stats, as_json);
        }
        if (*extract) return cmd_extract(extract_cfg, ex_corpus, ex_out);
        if (*retrieve) return cmd_retrieve(retrieve_cfg, re_corpus, re_entities, re_out);
        if (*context) return cmd_context(context_cfg, cx_corpus, cx_kb, cx_mode, cx_out);
        if (*classify) return cmd_classify(classify_cfg, cl_corpus, cl_contexts, cl_mode, cl_out);
        if (*evaluate) return cmd_evaluate(ev_preds, ev_gold, ev_macro, as_json);
        if (*compare) return cmd_compare(cp_baseline, cp_system, cp_gold, as_json);
        if (*ablate) return cmd_ablate(ab_original, ab_ablation, ab_gold, ab_threshold, as_json);
        if (*agreement) return cmd_agreement(ag_ratings, ag_compare, as_json);
        if (*run) return cmd_run(run_cfg, rn_corpus, rn_out, as_json);
    } catch (const vc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
