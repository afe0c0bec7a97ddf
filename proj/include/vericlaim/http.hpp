#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace vericlaim {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Resolves a named environment variable to an Authorization header; an empty
// name yields no headers. Credential values never reach manifests or logs.
HttpHeaders auth_headers_from_env(const std::string& env_var);

// Thin transport seam so tests can substitute fakes and spies. Implementations
// must be safe for concurrent use.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    // Throw ProviderError(retriable=true) on transport-level failure.
    virtual HttpResponse get(const std::string& url, const HttpHeaders& headers = {}) = 0;
    virtual HttpResponse post(const std::string& url, const std::string& body,
                              const std::string& content_type,
                              const HttpHeaders& headers = {}) = 0;
};

// cpp-httplib backed transport. Splits the URL into scheme://host[:port] and
// path?query itself.
class HttplibTransport : public HttpTransport {
public:
    explicit HttplibTransport(int timeout_seconds = 30);
    HttpResponse get(const std::string& url, const HttpHeaders& headers = {}) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const HttpHeaders& headers = {}) override;

private:
    int timeout_seconds_;
};

// Counts calls through to the inner transport; the spy used by replay tests.
class CountingTransport : public HttpTransport {
public:
    explicit CountingTransport(std::shared_ptr<HttpTransport> inner) : inner_(std::move(inner)) {}
    HttpResponse get(const std::string& url, const HttpHeaders& headers = {}) override {
        ++calls_;
        return inner_->get(url, headers);
    }
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const HttpHeaders& headers = {}) override {
        ++calls_;
        return inner_->post(url, body, content_type, headers);
    }
    size_t calls() const { return calls_.load(); }

private:
    std::shared_ptr<HttpTransport> inner_;
    std::atomic<size_t> calls_{0};
};

// Transport that always fails; stands in when no network access is intended.
class NullTransport : public HttpTransport {
public:
    HttpResponse get(const std::string& url, const HttpHeaders& headers = {}) override;
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::string& content_type, const HttpHeaders& headers = {}) override;
};

// Minimum-interval limiter shared across worker threads.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_slot_;
    std::mutex mutex_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{500};
    // Injectable so tests do not sleep for real.
    std::function<void(std::chrono::milliseconds)> sleep_fn;

    void wait(int attempt) const;
};

// Runs fn under the retry policy. Retries on ProviderError(retriable) and on
// HTTP 429/5xx; backoff doubles per attempt starting at base_delay.
HttpResponse with_retries(const RetryPolicy& policy, const std::function<HttpResponse()>& fn);

// Percent-encoding per RFC 3986 (unreserved characters kept verbatim,
// uppercase hex). Query strings built with this are byte-stable cache keys.
std::string url_encode(std::string_view value);

} // namespace vericlaim
