#include "wot/llm/client.hpp"

#include "wot/llm/providers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace wot::llm {

void validate(const ProviderConfig& config) {
    if (config.model_name.empty()) {
        throw ConfigError("provider model_name must be set");
    }
    if (config.kind == ProviderKind::http) {
        if (config.base_url.empty()) throw ConfigError("http provider requires base_url");
        if (config.credentials_env_var.empty()) throw ConfigError("http provider requires credentials_env_var");
    } else if (config.fixture_path.empty()) {
        throw ConfigError("mock provider requires fixture_path");
    }
    if (config.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    if (config.retry.base_backoff_seconds < 0) throw ConfigError("retry.base_backoff_seconds must be >= 0");
    if (config.request_timeout_seconds <= 0) throw ConfigError("request_timeout_seconds must be positive");
}

ProviderConfig provider_config_from_json(const nlohmann::json& j) {
    ProviderConfig c;
    const std::string kind = j.value("kind", "mock");
    if (kind == "http") {
        c.kind = ProviderKind::http;
    } else if (kind == "mock") {
        c.kind = ProviderKind::mock;
    } else {
        throw ConfigError("unknown provider kind: " + kind);
    }
    c.base_url = j.value("base_url", c.base_url);
    c.model_name = j.value("model_name", c.model_name);
    c.credentials_env_var = j.value("credentials_env_var", c.credentials_env_var);
    c.fixture_path = j.value("fixture_path", std::string{});
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
    c.tokens_per_minute = j.value("tokens_per_minute", c.tokens_per_minute);
    if (j.contains("retry")) {
        c.retry.max_attempts = j["retry"].value("max_attempts", c.retry.max_attempts);
        c.retry.base_backoff_seconds = j["retry"].value("base_backoff_seconds", c.retry.base_backoff_seconds);
    }
    c.request_timeout_seconds = j.value("request_timeout_seconds", c.request_timeout_seconds);
    c.strict_digest = j.value("strict_digest", c.strict_digest);
    validate(c);
    return c;
}

nlohmann::json to_json(const ProviderConfig& c) {
    nlohmann::json j = {{"kind", c.kind == ProviderKind::http ? "http" : "mock"},
                        {"model_name", c.model_name},
                        {"requests_per_minute", c.requests_per_minute},
                        {"tokens_per_minute", c.tokens_per_minute},
                        {"retry", {{"max_attempts", c.retry.max_attempts},
                                   {"base_backoff_seconds", c.retry.base_backoff_seconds}}},
                        {"request_timeout_seconds", c.request_timeout_seconds}};
    if (c.kind == ProviderKind::http) {
        j["base_url"] = c.base_url;
        j["credentials_env_var"] = c.credentials_env_var;
    } else {
        j["fixture_path"] = c.fixture_path.string();
        j["strict_digest"] = c.strict_digest;
    }
    return j;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    validate(config);
    if (config.kind == ProviderKind::http) {
        return std::make_unique<HttpProvider>(config);
    }
    return std::make_unique<MockProvider>(config.fixture_path, config.strict_digest);
}

namespace {

void real_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

Client::Client(ProviderConfig config) : Client(config, make_provider(config)) {}

Client::Client(ProviderConfig config, std::unique_ptr<Provider> provider, Sleeper sleeper)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper(real_sleep)),
      limiter_(config_.requests_per_minute, config_.tokens_per_minute, {}, sleeper_) {
    if (!provider_) {
        throw ConfigError("client needs a provider");
    }
}

CompletionResponse Client::complete(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw std::invalid_argument("complete: messages must be nonempty");
    }
    for (const auto& m : request.messages) validate(m);
    validate(request.params);

    const int max_attempts = std::max(1, config_.retry.max_attempts);
    double last_delay = 0.0;
    for (int attempt = 1;; ++attempt) {
        limiter_.acquire();
        {
            std::lock_guard lock(mutex_);
            ++totals_.attempts;
        }
        try {
            CompletionResponse response = provider_->send(request);
            response.attempts = attempt;
            limiter_.record_tokens(static_cast<long>(response.usage.total()));
            {
                std::lock_guard lock(mutex_);
                ++totals_.calls;
                totals_.usage += response.usage;
            }
            if (response.finish_reason == FinishReason::content_filter) {
                throw ContentFiltered("provider content filter rejected request for " +
                                      request.tag.instance_id,
                                      response.usage);
            }
            return response;
        } catch (const TransientError& e) {
            if (attempt >= max_attempts) {
                if (e.kind() == TransientError::Kind::rate_limit) {
                    throw RateLimited(std::string("rate limited after retries: ") + e.what());
                }
                throw TransportError(std::string("transient failure after retries: ") + e.what());
            }
            double delay = config_.retry.base_backoff_seconds * std::pow(2.0, attempt - 1);
            if (e.retry_after()) delay = std::max(delay, *e.retry_after());
            delay = std::max(delay, last_delay);
            last_delay = delay;
            {
                std::lock_guard lock(mutex_);
                backoff_log_.push_back(delay);
            }
            sleeper_(delay);
        }
    }
}

UsageTotals Client::totals() const {
    std::lock_guard lock(mutex_);
    return totals_;
}

std::vector<double> Client::backoff_log() const {
    std::lock_guard lock(mutex_);
    return backoff_log_;
}

CompletionResponse complete(const std::vector<ChatMessage>& messages, const GenerationParams& params,
                            const ProviderConfig& provider, const RequestTag& tag) {
    Client client(provider);
    return client.complete({messages, params, tag});
}

}  // namespace wot::llm
