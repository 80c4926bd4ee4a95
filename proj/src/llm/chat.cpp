#include "wot/llm/chat.hpp"

#include "wot/common/digest.hpp"

namespace wot::llm {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

Role parse_role(std::string_view text) {
    if (text == "system") return Role::system;
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    throw InvalidMessage("unknown role: " + std::string(text));
}

ChatMessage ChatMessage::text(Role role, std::string body) {
    ChatMessage m;
    m.role = role;
    m.parts.emplace_back(TextPart{std::move(body)});
    return m;
}

bool ChatMessage::has_image() const {
    for (const auto& part : parts) {
        if (std::holds_alternative<ImagePart>(part)) return true;
    }
    return false;
}

std::string ChatMessage::joined_text() const {
    std::string out;
    for (const auto& part : parts) {
        if (const auto* t = std::get_if<TextPart>(&part)) out += t->text;
    }
    return out;
}

void validate(const ChatMessage& message) {
    if (message.parts.empty()) {
        throw InvalidMessage("chat message must have at least one part");
    }
    for (const auto& part : message.parts) {
        const auto* image = std::get_if<ImagePart>(&part);
        if (image == nullptr) continue;
        if (message.role != Role::user) {
            throw InvalidMessage("image parts are only allowed in user messages");
        }
        if (image->mime != "image/png" && image->mime != "image/jpeg") {
            throw InvalidMessage("unsupported image mime type: " + image->mime);
        }
    }
}

void validate(const GenerationParams& params) {
    if (!(params.temperature >= 0.0)) {
        throw std::invalid_argument("temperature must be >= 0");
    }
    if (params.max_tokens <= 0) {
        throw std::invalid_argument("max_tokens must be positive");
    }
    if (!(params.top_p > 0.0 && params.top_p <= 1.0)) {
        throw std::invalid_argument("top_p must be in (0, 1]");
    }
}

GenerationParams default_params(ParamStage stage) {
    switch (stage) {
        case ParamStage::initial:
            return {.temperature = 0.0, .max_tokens = 2048, .top_p = 1.0, .frequency_penalty = 0.05, .presence_penalty = 0.0};
        case ParamStage::image_followup:
            return {.temperature = 0.0, .max_tokens = 256, .top_p = 1.0, .frequency_penalty = 0.0, .presence_penalty = 0.0};
    }
    return {};
}

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::content_filter: return "content_filter";
        case FinishReason::other: return "other";
    }
    return "other";
}

FinishReason parse_finish_reason(std::string_view text) {
    if (text == "stop") return FinishReason::stop;
    if (text == "length") return FinishReason::length;
    if (text == "content_filter") return FinishReason::content_filter;
    return FinishReason::other;
}

nlohmann::json to_transcript_json(const ChatMessage& message) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& part : message.parts) {
        if (const auto* t = std::get_if<TextPart>(&part)) {
            parts.push_back({{"type", "text"}, {"text", t->text}});
        } else {
            const auto& image = std::get<ImagePart>(part);
            parts.push_back({{"type", "image"},
                             {"mime", image.mime},
                             {"bytes", image.bytes.size()},
                             {"sha256", sha256_hex(image.bytes)}});
        }
    }
    return {{"role", to_string(message.role)}, {"parts", std::move(parts)}};
}

std::string prompt_digest(const std::vector<ChatMessage>& messages) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& m : messages) all.push_back(to_transcript_json(m));
    return sha256_hex(all.dump());
}

nlohmann::json to_json(const GenerationParams& p) {
    return {{"temperature", p.temperature},
            {"max_tokens", p.max_tokens},
            {"top_p", p.top_p},
            {"frequency_penalty", p.frequency_penalty},
            {"presence_penalty", p.presence_penalty}};
}

GenerationParams params_from_json(const nlohmann::json& j) {
    GenerationParams p;
    p.temperature = j.value("temperature", p.temperature);
    p.max_tokens = j.value("max_tokens", p.max_tokens);
    p.top_p = j.value("top_p", p.top_p);
    p.frequency_penalty = j.value("frequency_penalty", p.frequency_penalty);
    p.presence_penalty = j.value("presence_penalty", p.presence_penalty);
    validate(p);
    return p;
}

nlohmann::json to_json(const Usage& usage) {
    return {{"prompt_tokens", usage.prompt_tokens}, {"completion_tokens", usage.completion_tokens}};
}

}  // namespace wot::llm
