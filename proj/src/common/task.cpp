#include "wot/common/task.hpp"

#include <array>
#include <utility>

namespace wot {

namespace {

constexpr std::array<std::pair<TaskKind, std::string_view>, 4> kTaskNames{{
    {TaskKind::ascii_mnist, "ascii_mnist"},
    {TaskKind::ascii_word, "ascii_word"},
    {TaskKind::ascii_kanji, "ascii_kanji"},
    {TaskKind::navigation, "navigation"},
}};

constexpr std::array<std::pair<ErrorCategory, std::string_view>, 7> kCategoryNames{{
    {ErrorCategory::no_code, "no_code"},
    {ErrorCategory::code_execution, "code_execution"},
    {ErrorCategory::content_filtered, "content_filtered"},
    {ErrorCategory::provider_error, "provider_error"},
    {ErrorCategory::needs_review, "needs_review"},
    {ErrorCategory::poor_visualization, "poor_visualization"},
    {ErrorCategory::visual_perception, "visual_perception"},
}};

}  // namespace

std::string_view to_string(TaskKind kind) {
    for (const auto& [k, name] : kTaskNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

TaskKind parse_task_kind(std::string_view text) {
    for (const auto& [k, name] : kTaskNames) {
        if (name == text) return k;
    }
    if (text == "mnist") return TaskKind::ascii_mnist;
    if (text == "word") return TaskKind::ascii_word;
    if (text == "kanji") return TaskKind::ascii_kanji;
    if (text == "nav") return TaskKind::navigation;
    throw ParseError("unknown task kind: " + std::string(text));
}

std::string_view to_string(ErrorCategory category) {
    for (const auto& [c, name] : kCategoryNames) {
        if (c == category) return name;
    }
    return "unknown";
}

std::optional<ErrorCategory> parse_error_category(std::string_view text) {
    for (const auto& [c, name] : kCategoryNames) {
        if (name == text) return c;
    }
    return std::nullopt;
}

}  // namespace wot
