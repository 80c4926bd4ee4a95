#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wot::llm {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
Role parse_role(std::string_view text);

struct TextPart {
    std::string text;
    friend bool operator==(const TextPart&, const TextPart&) = default;
};

struct ImagePart {
    std::vector<std::uint8_t> bytes;
    std::string mime = "image/png";
    friend bool operator==(const ImagePart&, const ImagePart&) = default;
};

using ContentPart = std::variant<TextPart, ImagePart>;

struct ChatMessage {
    Role role = Role::user;
    std::vector<ContentPart> parts;

    static ChatMessage text(Role role, std::string body);

    bool has_image() const;
    /// Concatenation of all text parts, in order.
    std::string joined_text() const;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

class InvalidMessage : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws InvalidMessage unless the message has at least one part, image
/// parts sit only in user messages, and every image is PNG or JPEG.
void validate(const ChatMessage& message);

struct GenerationParams {
    double temperature = 0.0;
    int max_tokens = 2048;
    double top_p = 1.0;
    double frequency_penalty = 0.0;
    double presence_penalty = 0.0;

    friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

void validate(const GenerationParams& params);

enum class ParamStage { initial, image_followup };

/// Decoding settings for the first query of any strategy and for the
/// follow-up query that carries the rendered image.
GenerationParams default_params(ParamStage stage);

enum class FinishReason { stop, length, content_filter, other };

std::string_view to_string(FinishReason reason);
FinishReason parse_finish_reason(std::string_view text);

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    Usage& operator+=(const Usage& other) {
        prompt_tokens += other.prompt_tokens;
        completion_tokens += other.completion_tokens;
        return *this;
    }
    std::int64_t total() const { return prompt_tokens + completion_tokens; }
    friend bool operator==(const Usage&, const Usage&) = default;
};

struct CompletionResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::stop;
    Usage usage;
    int attempts = 1;
};

/// Identifies a request for fixture lookup and bookkeeping; never sent
/// to a remote provider.
struct RequestTag {
    std::string instance_id;
    int turn = 0;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    GenerationParams params;
    RequestTag tag;
};

/// Stable digest of the message list. Images contribute their own
/// SHA-256 rather than raw bytes.
std::string prompt_digest(const std::vector<ChatMessage>& messages);

/// Transcript form: text verbatim, images as {mime, bytes, sha256}.
nlohmann::json to_transcript_json(const ChatMessage& message);
nlohmann::json to_json(const GenerationParams& params);
GenerationParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Usage& usage);

}  // namespace wot::llm
