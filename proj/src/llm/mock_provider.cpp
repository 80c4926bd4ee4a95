#include "wot/llm/providers.hpp"

#include <fstream>

namespace wot::llm {

namespace {

std::int64_t estimate_tokens(std::size_t chars) {
    return static_cast<std::int64_t>((chars + 3) / 4);
}

}  // namespace

MockProvider::MockProvider(std::map<std::pair<std::string, int>, Entry> entries, bool strict_digest)
    : entries_(std::move(entries)), strict_digest_(strict_digest) {}

MockProvider::MockProvider(const std::filesystem::path& fixture, bool strict_digest)
    : strict_digest_(strict_digest) {
    std::ifstream in(fixture);
    if (!in) {
        throw ConfigError("cannot open mock fixture " + fixture.string());
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Entry e;
            e.text = j.at("text").get<std::string>();
            e.finish_reason = parse_finish_reason(j.value("finish_reason", "stop"));
            if (j.contains("prompt_digest")) e.prompt_digest = j["prompt_digest"].get<std::string>();
            e.accepts_image = j.value("image", false);
            if (j.contains("prompt_tokens")) e.prompt_tokens = j["prompt_tokens"].get<std::int64_t>();
            if (j.contains("completion_tokens")) e.completion_tokens = j["completion_tokens"].get<std::int64_t>();
            auto key = std::make_pair(j.at("instance_id").get<std::string>(), j.at("turn").get<int>());
            entries_.insert_or_assign(std::move(key), std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(fixture.string() + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
}

CompletionResponse MockProvider::send(const ChatRequest& request) {
    const auto& tag = request.tag;
    const auto it = entries_.find({tag.instance_id, tag.turn});
    if (it == entries_.end()) {
        throw MockMiss("no mock entry for (" + tag.instance_id + ", " + std::to_string(tag.turn) + ")");
    }
    const Entry& entry = it->second;

    bool has_image = false;
    std::size_t prompt_chars = 0;
    for (const auto& m : request.messages) {
        has_image = has_image || m.has_image();
        prompt_chars += m.joined_text().size();
    }
    if (has_image && !entry.accepts_image) {
        throw MockMiss("mock entry (" + tag.instance_id + ", " + std::to_string(tag.turn) +
                       ") has no image response");
    }
    if (strict_digest_ && entry.prompt_digest && *entry.prompt_digest != prompt_digest(request.messages)) {
        throw MockMiss("prompt digest mismatch for (" + tag.instance_id + ", " + std::to_string(tag.turn) + ")");
    }

    CompletionResponse r;
    r.text = entry.text;
    r.finish_reason = entry.finish_reason;
    r.usage.prompt_tokens = entry.prompt_tokens.value_or(estimate_tokens(prompt_chars));
    if (entry.completion_tokens) {
        r.usage.completion_tokens = *entry.completion_tokens;
    } else if (entry.finish_reason == FinishReason::length) {
        r.usage.completion_tokens = request.params.max_tokens;
    } else {
        r.usage.completion_tokens = estimate_tokens(entry.text.size());
    }
    return r;
}

nlohmann::json mock_fixture_line(const std::string& instance_id, int turn, const MockProvider::Entry& entry) {
    nlohmann::json j = {{"instance_id", instance_id},
                        {"turn", turn},
                        {"text", entry.text},
                        {"finish_reason", to_string(entry.finish_reason)}};
    if (entry.prompt_digest) j["prompt_digest"] = *entry.prompt_digest;
    if (entry.accepts_image) j["image"] = true;
    if (entry.prompt_tokens) j["prompt_tokens"] = *entry.prompt_tokens;
    if (entry.completion_tokens) j["completion_tokens"] = *entry.completion_tokens;
    return j;
}

}  // namespace wot::llm
