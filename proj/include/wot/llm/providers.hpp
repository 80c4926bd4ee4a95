#pragma once

#include "wot/llm/client.hpp"

#include <map>
#include <utility>

namespace wot::llm {

/// Replays completions from a JSONL fixture keyed by (instance_id, turn).
///
/// Line schema: {instance_id, turn, text, finish_reason?, prompt_digest?,
/// image?, prompt_tokens?, completion_tokens?}. A request carrying an image
/// only resolves against an entry with "image": true. Missing usage is
/// estimated at four characters per token so accounting stays deterministic.
class MockProvider : public Provider {
public:
    struct Entry {
        std::string text;
        FinishReason finish_reason = FinishReason::stop;
        std::optional<std::string> prompt_digest;
        bool accepts_image = false;
        std::optional<std::int64_t> prompt_tokens;
        std::optional<std::int64_t> completion_tokens;
    };

    MockProvider(const std::filesystem::path& fixture, bool strict_digest = false);
    MockProvider(std::map<std::pair<std::string, int>, Entry> entries, bool strict_digest = false);

    CompletionResponse send(const ChatRequest& request) override;

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, int>, Entry> entries_;
    bool strict_digest_;
};

nlohmann::json mock_fixture_line(const std::string& instance_id, int turn, const MockProvider::Entry& entry);

/// OpenAI-compatible chat-completions backend.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);

    CompletionResponse send(const ChatRequest& request) override;

    /// Request body for POST {base_url}/chat/completions; images become
    /// base64 data URLs.
    static nlohmann::json request_body(const ChatRequest& request, const std::string& model);
    /// Throws TransportError when the body lacks a first choice.
    static CompletionResponse parse_response(const nlohmann::json& body);

private:
    ProviderConfig config_;
    std::string host_;
    std::string path_prefix_;
};

}  // namespace wot::llm
