#pragma once

#include <functional>
#include <memory>
#include <string>

#include "vericlaim/cache.hpp"
#include "vericlaim/http.hpp"

namespace vericlaim {

// Temperature stays 0 for every pipeline call; the cache key and the
// determinism contract both depend on it.
struct LlmRequest {
    std::string prompt;
    double temperature = 0.0;
    int max_output_tokens = 400;
    std::string model;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const LlmRequest& request) = 0;
    virtual std::string id() const = 0;
};

// POST {"model", "prompt", "temperature", "max_tokens"} -> {"text": ...},
// the shape spoken by common completion-style gateways.
class HttpLlmProvider : public LlmProvider {
public:
    HttpLlmProvider(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                    std::string model, std::shared_ptr<RateLimiter> limiter = nullptr,
                    RetryPolicy retry = {}, HttpHeaders headers = {});

    std::string complete(const LlmRequest& request) override;
    std::string id() const override { return "http:" + model_; }

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string endpoint_;
    std::string model_;
    std::shared_ptr<RateLimiter> limiter_;
    RetryPolicy retry_;
    HttpHeaders headers_;
};

// Cache keyed by (model, prompt) only; decoding parameters are pinned, so
// they stay out of the key. In replay mode this is the fixture reader.
class CachingLlmProvider : public LlmProvider {
public:
    CachingLlmProvider(std::shared_ptr<LlmProvider> inner, ResponseCache cache, RunMode mode);

    std::string complete(const LlmRequest& request) override;
    std::string id() const override { return inner_ ? inner_->id() : "replay"; }

    static std::string cache_key(const std::string& model, const std::string& prompt);

private:
    std::shared_ptr<LlmProvider> inner_; // may be null in replay mode
    ResponseCache cache_;
    RunMode mode_;
};

// Deterministic function-backed provider for tests and offline smoke runs.
class FnLlmProvider : public LlmProvider {
public:
    FnLlmProvider(std::function<std::string(const LlmRequest&)> fn, std::string tag)
        : fn_(std::move(fn)), tag_(std::move(tag)) {}

    std::string complete(const LlmRequest& request) override { return fn_(request); }
    std::string id() const override { return tag_; }

private:
    std::function<std::string(const LlmRequest&)> fn_;
    std::string tag_;
};

} // namespace vericlaim
