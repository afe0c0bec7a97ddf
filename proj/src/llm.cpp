#include "vericlaim/llm.hpp"

#include <json.hpp>

#include "vericlaim/errors.hpp"
#include "vericlaim/sha256.hpp"

namespace vericlaim {

HttpLlmProvider::HttpLlmProvider(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                                 std::string model, std::shared_ptr<RateLimiter> limiter,
                                 RetryPolicy retry, HttpHeaders headers)
    : transport_(std::move(transport)),
      endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      limiter_(std::move(limiter)),
      retry_(std::move(retry)),
      headers_(std::move(headers)) {}

std::string HttpLlmProvider::complete(const LlmRequest& request) {
    nlohmann::json body = {{"model", model_.empty() ? request.model : model_},
                           {"prompt", request.prompt},
                           {"temperature", request.temperature},
                           {"max_tokens", request.max_output_tokens}};
    auto response = with_retries(retry_, [&] {
        if (limiter_) limiter_->acquire();
        return transport_->post(endpoint_, body.dump(), "application/json", headers_);
    });
    if (response.status != 200) {
        throw ProviderError("LLM provider returned HTTP " + std::to_string(response.status));
    }
    try {
        return nlohmann::json::parse(response.body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("LLM provider sent malformed JSON: ") + e.what());
    }
}

CachingLlmProvider::CachingLlmProvider(std::shared_ptr<LlmProvider> inner, ResponseCache cache,
                                       RunMode mode)
    : inner_(std::move(inner)), cache_(std::move(cache)), mode_(mode) {
    if (mode_ != RunMode::replay && !inner_) {
        throw ConfigError("LLM provider required outside replay mode");
    }
}

std::string CachingLlmProvider::cache_key(const std::string& model, const std::string& prompt) {
    return "llm\n" + model + "\n" + prompt;
}

std::string CachingLlmProvider::complete(const LlmRequest& request) {
    std::string model = inner_ ? inner_->id() : request.model;
    std::string key = cache_key(model, request.prompt);
    if (mode_ != RunMode::live && cache_.enabled()) {
        if (auto hit = cache_.get(key)) return hit->get<std::string>();
    }
    if (mode_ == RunMode::replay) {
        throw CacheMissError("replay: no cached completion for prompt hash " + sha256_hex(key));
    }
    std::string text = inner_->complete(request);
    if (mode_ == RunMode::record && cache_.enabled()) cache_.put(key, text);
    return text;
}

} // namespace vericlaim
