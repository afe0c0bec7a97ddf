#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vericlaim/cache.hpp"
#include "vericlaim/http.hpp"

namespace vericlaim {

struct EmbeddingVector {
    std::vector<double> values;

    size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

// Weighted-combination parameters for candidate re-ranking. Defaults are the
// fixed values used throughout: alpha 0.8, beta 0.2, theta 0.5, p 5.
struct RetrievalWeights {
    double alpha = 0.8;
    double beta = 0.2;
    double theta = 0.5;
    int p = 5;

    void validate() const;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // Text must be non-empty after trimming; deterministic per (provider, text).
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual size_t dim() const = 0;
    virtual std::string id() const = 0;
};

// Offline deterministic embedder: each whitespace token maps to a unit vector
// whose components are drawn from a splitmix64 stream seeded by the token's
// FNV-1a hash; the text vector is the mean of its token vectors. Identical
// across machines, which is what the replay tests need.
class HashEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HashEmbeddingProvider(size_t dim = 64);

    EmbeddingVector embed(const std::string& text) override;
    EmbeddingVector token_vector(const std::string& token) const;
    size_t dim() const override { return dim_; }
    std::string id() const override { return "hash:dim=" + std::to_string(dim_); }

private:
    size_t dim_;
};

// HTTP provider: POST {"model", "texts": [...]} -> {"vectors": [[...], ...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                          std::string model, std::shared_ptr<RateLimiter> limiter = nullptr,
                          RetryPolicy retry = {}, HttpHeaders headers = {});

    EmbeddingVector embed(const std::string& text) override;
    size_t dim() const override { return session_dim_; }
    std::string id() const override { return "http:" + model_; }

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string endpoint_;
    std::string model_;
    std::shared_ptr<RateLimiter> limiter_;
    RetryPolicy retry_;
    HttpHeaders headers_;
    size_t session_dim_ = 0; // fixed by the first response
    std::mutex mutex_;
};

// Content-hash cache in front of any provider. Key depends only on
// (provider id, text). Replay mode fails hard on a miss.
class CachingEmbeddingProvider : public EmbeddingProvider {
public:
    CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, ResponseCache cache,
                             RunMode mode);

    EmbeddingVector embed(const std::string& text) override;
    size_t dim() const override { return inner_->dim(); }
    std::string id() const override { return inner_->id(); }

private:
    std::shared_ptr<EmbeddingProvider> inner_;
    ResponseCache cache_;
    RunMode mode_;
};

// Inputs longer than this are cut at a word boundary before embedding;
// provider input limits bound extract length.
inline constexpr size_t kEmbedInputCap = 1500;

std::string truncate_for_embedding(const std::string& text);

// dot(u,v) / (|u||v|); 0 when either norm is zero. Dimensions must match.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

// alpha * extract_sim + beta * title_sim, unclamped.
double relevance_score(double extract_sim, double title_sim, const RetrievalWeights& w);

} // namespace vericlaim
