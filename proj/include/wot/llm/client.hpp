#pragma once

#include "wot/llm/chat.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot::llm {

// Errors surfaced by complete(). Everything derives from ClientError so
// the harness can record any of them as a provider failure.
class ClientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class AuthError : public ClientError {
public:
    using ClientError::ClientError;
};
class RateLimited : public ClientError {
public:
    using ClientError::ClientError;
};
/// The provider refused the content. Never retried.
class ContentFiltered : public ClientError {
public:
    explicit ContentFiltered(const std::string& what, Usage usage = {}) : ClientError(what), usage_(usage) {}
    /// Tokens billed for the refused call, when the provider reported them.
    const Usage& usage() const { return usage_; }

private:
    Usage usage_;
};
class TransportError : public ClientError {
public:
    using ClientError::ClientError;
};
class MockMiss : public ClientError {
public:
    using ClientError::ClientError;
};
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by a Provider for failures worth retrying (429, 5xx, timeouts,
/// dropped connections). Client converts the last one into RateLimited or
/// TransportError once the retry budget is spent.
class TransientError : public std::runtime_error {
public:
    enum class Kind { rate_limit, server, network };

    TransientError(Kind kind, const std::string& what, std::optional<double> retry_after = std::nullopt)
        : std::runtime_error(what), kind_(kind), retry_after_(retry_after) {}

    Kind kind() const { return kind_; }
    std::optional<double> retry_after() const { return retry_after_; }

private:
    Kind kind_;
    std::optional<double> retry_after_;
};

struct RetryPolicy {
    int max_attempts = 3;
    double base_backoff_seconds = 1.0;
};

enum class ProviderKind { http, mock };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::mock;
    std::string base_url;
    std::string model_name = "gpt-4o-2024-05-13";
    std::string credentials_env_var;
    std::filesystem::path fixture_path;
    int requests_per_minute = 0;  // 0 = unlimited
    long tokens_per_minute = 0;   // 0 = unlimited
    RetryPolicy retry;
    double request_timeout_seconds = 120.0;
    /// Mock only: also require the fixture's prompt_digest to match.
    bool strict_digest = false;
};

/// Throws ConfigError when kind-specific fields are missing.
void validate(const ProviderConfig& config);
ProviderConfig provider_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProviderConfig& config);

/// One attempt against a backend. Implementations throw TransientError
/// for retryable failures and ClientError subclasses for final ones.
class Provider {
public:
    virtual ~Provider() = default;
    virtual CompletionResponse send(const ChatRequest& request) = 0;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

/// Sliding 60 s window limiter on request count and token volume.
/// Shared by all workers; acquire() blocks until the request fits.
class RateLimiter {
public:
    using Clock = std::function<double()>;
    using Sleeper = std::function<void(double)>;

    RateLimiter(int requests_per_minute, long tokens_per_minute, Clock clock = {}, Sleeper sleeper = {});

    void acquire();
    void record_tokens(long tokens);

private:
    struct Entry {
        double at;
        long tokens;
    };
    void prune(double now);

    int rpm_;
    long tpm_;
    Clock clock_;
    Sleeper sleeper_;
    std::mutex mutex_;
    std::vector<Entry> requests_;
    std::vector<Entry> tokens_;
};

struct UsageTotals {
    Usage usage;
    long calls = 0;
    long attempts = 0;
};

/// Retrying, rate-limited, usage-accounting front end over a Provider.
/// Safe to share across threads.
class Client {
public:
    using Sleeper = std::function<void(double)>;

    explicit Client(ProviderConfig config);
    Client(ProviderConfig config, std::unique_ptr<Provider> provider, Sleeper sleeper = {});

    CompletionResponse complete(const ChatRequest& request);

    UsageTotals totals() const;
    /// Every backoff delay slept so far, in order.
    std::vector<double> backoff_log() const;
    const ProviderConfig& config() const { return config_; }

private:
    ProviderConfig config_;
    std::unique_ptr<Provider> provider_;
    Sleeper sleeper_;
    RateLimiter limiter_;
    mutable std::mutex mutex_;
    UsageTotals totals_;
    std::vector<double> backoff_log_;
};

/// One-shot convenience over Client.
CompletionResponse complete(const std::vector<ChatMessage>& messages, const GenerationParams& params,
                            const ProviderConfig& provider, const RequestTag& tag = {});

}  // namespace wot::llm
