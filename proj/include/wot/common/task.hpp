#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wot {

enum class TaskKind { ascii_mnist, ascii_word, ascii_kanji, navigation };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view text);

/// One benchmark item as the pipeline sees it. Task-specific structure
/// (font category, navigation geometry) travels in `metadata`.
struct TaskInstance {
    std::string id;
    TaskKind kind = TaskKind::ascii_word;
    std::string input;
    std::string target;
    std::map<std::string, std::string> metadata;
};

/// Why an instance did not produce a correct answer.
enum class ErrorCategory {
    no_code,
    code_execution,
    content_filtered,
    provider_error,
    needs_review,
    poor_visualization,
    visual_perception,
};

std::string_view to_string(ErrorCategory category);
std::optional<ErrorCategory> parse_error_category(std::string_view text);

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace wot
