#include "wot/strategy/extract.hpp"

namespace wot::strategy {

namespace {

constexpr std::string_view kFence = "```";
constexpr std::string_view kWhitespace = " \t\r\n\f\v";
constexpr std::string_view kQuotes = "\"'`";

std::string_view trim(std::string_view s, std::string_view chars) {
    const auto first = s.find_first_not_of(chars);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(chars);
    return s.substr(first, last - first + 1);
}

std::string_view normalize_block(std::string_view block) {
    // Drop whole leading lines that are blank, keep indentation of the first code line.
    std::size_t start = 0;
    for (;;) {
        const auto nl = block.find('\n', start);
        if (nl == std::string_view::npos) break;
        if (block.substr(start, nl - start).find_first_not_of(" \t\r") != std::string_view::npos) break;
        start = nl + 1;
    }
    block.remove_prefix(start);
    const auto last = block.find_last_not_of(kWhitespace);
    return last == std::string_view::npos ? std::string_view{} : block.substr(0, last + 1);
}

}  // namespace

std::vector<std::string> find_fenced_blocks(std::string_view text, std::string_view fence_tag) {
    std::string opener(kFence);
    opener += fence_tag;

    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto open = text.find(opener, pos);
        if (open == std::string_view::npos) break;
        const auto body = open + opener.size();
        const auto close = text.find(kFence, body);
        // No closing fence after the earliest opener means none after any later opener either.
        if (close == std::string_view::npos) break;
        blocks.emplace_back(text.substr(body, close - body));
        pos = close + kFence.size();
    }
    return blocks;
}

std::optional<std::string> extract_code(std::string_view text, std::string_view fence_tag) {
    const auto blocks = find_fenced_blocks(text, fence_tag);
    if (blocks.empty()) return std::nullopt;
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) out += '\n';
        out += normalize_block(blocks[i]);
    }
    return out;
}

std::string extract_final_answer(std::string_view text, std::string_view marker) {
    std::string_view answer = text;
    if (!marker.empty()) {
        const auto at = text.rfind(marker);
        if (at != std::string_view::npos) answer = text.substr(at + marker.size());
    }
    answer = trim(answer, kWhitespace);
    // Quotes first, then any whitespace they enclosed: "\" q \"" -> "q".
    answer = trim(trim(answer, kQuotes), kWhitespace);
    return std::string(answer);
}

}  // namespace wot::strategy
