#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wot::strategy {

/// Every non-overlapping span between "```<fence_tag>" and the next "```",
/// scanning left to right; equivalent to
/// re.findall(r"```<tag>(.*?)```", text, re.DOTALL) with a literal tag.
/// Captures are returned verbatim, including the newline after the tag.
std::vector<std::string> find_fenced_blocks(std::string_view text, std::string_view fence_tag);

/// The fenced blocks joined in order with one '\n'. Each block first loses
/// its leading blank lines and trailing whitespace. Absent when no block
/// matches.
std::optional<std::string> extract_code(std::string_view text, std::string_view fence_tag = "python");

/// Text after the last `marker`, trimmed of whitespace and of surrounding
/// quote characters; the whole text trimmed when the marker is absent.
std::string extract_final_answer(std::string_view text, std::string_view marker = "Answer:");

}  // namespace wot::strategy
