#include "vericlaim/http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "vericlaim/errors.hpp"

namespace vericlaim {

HttpHeaders auth_headers_from_env(const std::string& env_var) {
    if (env_var.empty()) return {};
    const char* value = std::getenv(env_var.c_str());
    if (value == nullptr || *value == '\0') {
        throw ConfigError("credential environment variable not set: " + env_var);
    }
    return {{"Authorization", std::string("Bearer ") + value}};
}

namespace {

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string target; // /path?query
};

UrlParts split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

HttplibTransport::HttplibTransport(int timeout_seconds) : timeout_seconds_(timeout_seconds) {}

HttpResponse HttplibTransport::get(const std::string& url, const HttpHeaders& headers) {
    auto parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_follow_location(true);
    httplib::Headers hs(headers.begin(), headers.end());
    auto res = client.Get(parts.target, hs);
    if (!res) {
        throw ProviderError("GET " + url + " failed: " + httplib::to_string(res.error()),
                            /*retriable=*/true);
    }
    return {res->status, res->body};
}

HttpResponse HttplibTransport::post(const std::string& url, const std::string& body,
                                    const std::string& content_type, const HttpHeaders& headers) {
    auto parts = split_url(url);
    httplib::Client client(parts.origin);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers hs(headers.begin(), headers.end());
    auto res = client.Post(parts.target, hs, body, content_type);
    if (!res) {
        throw ProviderError("POST " + url + " failed: " + httplib::to_string(res.error()),
                            /*retriable=*/true);
    }
    return {res->status, res->body};
}

HttpResponse NullTransport::get(const std::string& url, const HttpHeaders&) {
    throw ProviderError("network access disabled (GET " + url + ")", /*retriable=*/false);
}

HttpResponse NullTransport::post(const std::string& url, const std::string&, const std::string&,
                                 const HttpHeaders&) {
    throw ProviderError("network access disabled (POST " + url + ")", /*retriable=*/false);
}

RateLimiter::RateLimiter(double requests_per_second) {
    if (requests_per_second <= 0) throw ConfigError("rate limit must be positive");
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / requests_per_second));
    next_slot_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto now = std::chrono::steady_clock::now();
        if (next_slot_ < now) next_slot_ = now;
        slot = next_slot_;
        next_slot_ += interval_;
    }
    std::this_thread::sleep_until(slot);
}

void RetryPolicy::wait(int attempt) const {
    auto delay = base_delay * (1 << attempt);
    if (sleep_fn) {
        sleep_fn(std::chrono::duration_cast<std::chrono::milliseconds>(delay));
    } else {
        std::this_thread::sleep_for(delay);
    }
}

HttpResponse with_retries(const RetryPolicy& policy, const std::function<HttpResponse()>& fn) {
    std::string last_error;
    for (int attempt = 0; attempt < policy.attempts; ++attempt) {
        if (attempt > 0) policy.wait(attempt - 1);
        try {
            HttpResponse res = fn();
            if (res.status == 429 || res.status >= 500) {
                last_error = "HTTP " + std::to_string(res.status);
                continue;
            }
            return res;
        } catch (const ProviderError& e) {
            if (!e.retriable()) throw;
            last_error = e.what();
        }
    }
    throw ProviderError("request failed after " + std::to_string(policy.attempts) +
                            " attempts: " + last_error,
                        /*retriable=*/false);
}

std::string url_encode(std::string_view value) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        unsigned char u = static_cast<unsigned char>(c);
        bool unreserved = (u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') ||
                          (u >= '0' && u <= '9') || u == '-' || u == '_' || u == '.' || u == '~';
        if (unreserved) {
            out.push_back(c);
        } else {
            out.push_back('%');
            out.push_back(hex[u >> 4]);
            out.push_back(hex[u & 0xf]);
        }
    }
    return out;
}

} // namespace vericlaim
