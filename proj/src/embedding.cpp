#include "vericlaim/embedding.hpp"

#include <cmath>

#include <json.hpp>

#include "vericlaim/errors.hpp"
#include "vericlaim/rng.hpp"
#include "vericlaim/sha256.hpp"
#include "vericlaim/text.hpp"

namespace vericlaim {

void RetrievalWeights::validate() const {
    if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0) {
        throw ConfigError("alpha and beta must lie in [0, 1]");
    }
    if (std::abs(alpha + beta - 1.0) > 1e-9) {
        throw ConfigError("alpha + beta must equal 1");
    }
    if (theta < -1.0 || theta > 1.0) {
        throw ConfigError("theta must lie in the cosine range [-1, 1]");
    }
    if (p <= 0) throw ConfigError("p must be positive");
}

HashEmbeddingProvider::HashEmbeddingProvider(size_t dim) : dim_(dim) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
}

EmbeddingVector HashEmbeddingProvider::token_vector(const std::string& token) const {
    uint64_t state = fnv1a64(token);
    EmbeddingVector v;
    v.values.resize(dim_);
    double norm_sq = 0.0;
    for (size_t i = 0; i < dim_; ++i) {
        double x = unit_interval_signed(splitmix64(state));
        v.values[i] = x;
        norm_sq += x * x;
    }
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
        v.values[0] = 1.0;
        return v;
    }
    for (double& x : v.values) x /= norm;
    return v;
}

EmbeddingVector HashEmbeddingProvider::embed(const std::string& text) {
    auto tokens = whitespace_tokens(text);
    if (tokens.empty()) throw ConfigError("cannot embed empty text");
    EmbeddingVector sum;
    sum.values.assign(dim_, 0.0);
    for (const auto& token : tokens) {
        auto tv = token_vector(token);
        for (size_t i = 0; i < dim_; ++i) sum.values[i] += tv.values[i];
    }
    for (double& x : sum.values) x /= static_cast<double>(tokens.size());
    return sum;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::shared_ptr<HttpTransport> transport,
                                             std::string endpoint, std::string model,
                                             std::shared_ptr<RateLimiter> limiter,
                                             RetryPolicy retry, HttpHeaders headers)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      limiter_(std::move(limiter)),
      retry_(std::move(retry)),
      headers_(std::move(headers)) {}

EmbeddingVector HttpEmbeddingProvider::embed(const std::string& text) {
    if (trim(text).empty()) throw ConfigError("cannot embed empty text");
    nlohmann::json request = {{"model", model_}, {"texts", nlohmann::json::array({text})}};
    auto response = with_retries(retry_, [&] {
        if (limiter_) limiter_->acquire();
        return transport_->post(endpoint_, request.dump(), "application/json", headers_);
    });
    if (response.status != 200) {
        throw ProviderError("embedding provider returned HTTP " + std::to_string(response.status));
    }
    EmbeddingVector v;
    try {
        auto payload = nlohmann::json::parse(response.body);
        const auto& vectors = payload.at("vectors");
        if (!vectors.is_array() || vectors.size() != 1) {
            throw ProviderError("embedding provider returned wrong vector count");
        }
        v.values = vectors[0].get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("embedding provider sent malformed JSON: ") + e.what());
    }
    std::lock_guard<std::mutex> lock(mutex_);
    if (session_dim_ == 0) session_dim_ = v.dim();
    if (v.dim() != session_dim_) {
        throw ProviderError("embedding dimension changed within session: expected " +
                            std::to_string(session_dim_) + ", got " + std::to_string(v.dim()));
    }
    return v;
}

CachingEmbeddingProvider::CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner,
                                                   ResponseCache cache, RunMode mode)
    : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode) {}

EmbeddingVector CachingEmbeddingProvider::embed(const std::string& text) {
    std::string key = "embed\n" + inner_->id() + "\n" + text;
    if (mode_ != RunMode::live && cache_.enabled()) {
        if (auto hit = cache_.get(key)) {
            EmbeddingVector v;
            v.values = hit->get<std::vector<double>>();
            return v;
        }
    }
    if (mode_ == RunMode::replay) {
        throw CacheMissError("replay: no cached embedding for text hash " + sha256_hex(key));
    }
    EmbeddingVector v = inner_->embed(text);
    if (mode_ == RunMode::record && cache_.enabled()) cache_.put(key, v.values);
    return v;
}

std::string truncate_for_embedding(const std::string& text) {
    return truncate_at_word_boundary(text, kEmbedInputCap);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim()) {
        throw ConfigError("cosine: dimension mismatch (" + std::to_string(u.dim()) + " vs " +
                          std::to_string(v.dim()) + ")");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.dim(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double relevance_score(double extract_sim, double title_sim, const RetrievalWeights& w) {
    return w.alpha * extract_sim + w.beta * title_sim;
}

} // namespace vericlaim
