#pragma once

#include <stdexcept>
#include <string>

namespace vericlaim {

// Base class for all operational errors raised by the pipeline.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent configuration (unknown enum value, invalid weights, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Filesystem / parsing problems on input or output artifacts.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// A provider (NER, embedding, LLM, wiki) failed after retries. Carries the
// claim id when the failure is attributable to a single claim.
class ProviderError : public Error {
public:
    ProviderError(const std::string& msg, bool retriable = false, std::string claim_id = {})
        : Error(msg), retriable_(retriable), claim_id_(std::move(claim_id)) {}

    bool retriable() const { return retriable_; }
    const std::string& claim_id() const { return claim_id_; }

private:
    bool retriable_;
    std::string claim_id_;
};

// Replay mode hit a key that was never recorded.
class CacheMissError : public Error {
public:
    explicit CacheMissError(const std::string& msg) : Error(msg) {}
};

} // namespace vericlaim
