#include "wot/llm/providers.hpp"

#include "wot/common/digest.hpp"

#include <httplib.h>

#include <cstdlib>
#include <regex>

namespace wot::llm {

namespace {

nlohmann::json wire_content(const ChatMessage& message) {
    // Plain string content for text-only messages keeps requests compatible
    // with servers that do not accept the parts array.
    if (!message.has_image() && message.parts.size() == 1) {
        return message.joined_text();
    }
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : message.parts) {
        if (const auto* t = std::get_if<TextPart>(&part)) {
            parts.push_back({{"type", "text"}, {"text", t->text}});
        } else {
            const auto& image = std::get<ImagePart>(part);
            parts.push_back({{"type", "image_url"},
                             {"image_url", {{"url", "data:" + image.mime + ";base64," + base64_encode(image.bytes)}}}});
        }
    }
    return parts;
}

std::optional<double> retry_after_seconds(const httplib::Result& res) {
    if (!res->has_header("Retry-After")) return std::nullopt;
    try {
        return std::stod(res->get_header_value("Retry-After"));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

bool is_content_filter_error(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        if (j.contains("error") && j["error"].is_object()) {
            const auto code = j["error"].value("code", std::string{});
            return code == "content_filter" || code == "content_policy_violation";
        }
    } catch (const nlohmann::json::exception&) {
    }
    return false;
}

}  // namespace

HttpProvider::HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.base_url, m, kUrl)) {
        throw ConfigError("malformed base_url: " + config_.base_url);
    }
    host_ = m[1].str();
    path_prefix_ = m[2].matched ? m[2].str() : "";
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

nlohmann::json HttpProvider::request_body(const ChatRequest& request, const std::string& model) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role)}, {"content", wire_content(m)}});
    }
    const auto& p = request.params;
    nlohmann::json body = {{"model", model},
                           {"messages", std::move(messages)},
                           {"temperature", p.temperature},
                           {"max_tokens", p.max_tokens},
                           {"top_p", p.top_p},
                           {"frequency_penalty", p.frequency_penalty},
                           {"presence_penalty", p.presence_penalty}};
    if (p.temperature == 0.0) {
        // Greedy decoding; a fixed seed asks the provider for best-effort determinism as well.
        body["seed"] = 0;
    }
    return body;
}

CompletionResponse HttpProvider::parse_response(const nlohmann::json& body) {
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty()) {
        throw TransportError("response has no choices");
    }
    const auto& choice = body["choices"][0];
    CompletionResponse r;
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
        r.text = choice["message"]["content"].get<std::string>();
    }
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        r.finish_reason = parse_finish_reason(choice["finish_reason"].get<std::string>());
    } else {
        r.finish_reason = FinishReason::other;
    }
    if (body.contains("usage") && body["usage"].is_object()) {
        r.usage.prompt_tokens = std::max<std::int64_t>(0, body["usage"].value("prompt_tokens", std::int64_t{0}));
        r.usage.completion_tokens =
            std::max<std::int64_t>(0, body["usage"].value("completion_tokens", std::int64_t{0}));
    }
    return r;
}

CompletionResponse HttpProvider::send(const ChatRequest& request) {
    const char* key = std::getenv(config_.credentials_env_var.c_str());
    if (key == nullptr || *key == '\0') {
        throw AuthError("credential variable " + config_.credentials_env_var + " is not set");
    }

    httplib::Client cli(host_);
    const auto timeout_us = static_cast<long>(config_.request_timeout_seconds * 1e6);
    cli.set_connection_timeout(timeout_us / 1000000, timeout_us % 1000000);
    cli.set_read_timeout(timeout_us / 1000000, timeout_us % 1000000);
    cli.set_write_timeout(timeout_us / 1000000, timeout_us % 1000000);
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

    const std::string body = request_body(request, config_.model_name).dump();
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");
    if (!res) {
        throw TransientError(TransientError::Kind::network, "http error: " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
        throw AuthError("provider rejected credentials (HTTP " + std::to_string(status) + ")");
    }
    if (status == 429) {
        throw TransientError(TransientError::Kind::rate_limit, "HTTP 429", retry_after_seconds(res));
    }
    if (status >= 500) {
        throw TransientError(TransientError::Kind::server, "HTTP " + std::to_string(status));
    }
    if (status != 200) {
        if (is_content_filter_error(res->body)) {
            throw ContentFiltered("provider content filter rejected request");
        }
        throw TransportError("HTTP " + std::to_string(status) + ": " + res->body.substr(0, 512));
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed response body: ") + e.what());
    }
    return parse_response(parsed);
}

}  // namespace wot::llm
