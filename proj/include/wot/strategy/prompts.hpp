#pragma once

// Every prompt string the harness sends lives here. Bump kPromptSetVersion
// whenever any of them changes; it is written into each run's records so
// results from different prompt sets are never mixed silently.

#include <string>
#include <string_view>

namespace wot::strategy::prompts {

inline constexpr std::string_view kPromptSetVersion = "wot-prompts/1";

/// System prompt for the code-writing turn; `tool` is e.g. "Matplotlib".
std::string visualization_system(std::string_view tool);

inline constexpr std::string_view kDirectSystem =
    "You are given a task to solve. Make sure to output an answer after \"Answer:\" without any explanation.";

/// Zero-shot chain of thought, first turn: appended after the query.
inline constexpr std::string_view kStepByStep = "Let's think step by step.";

/// Zero-shot chain of thought, second turn: sent after the model's reasoning.
std::string cot_answer_extraction(std::string_view marker);

/// Text that accompanies a rendered visualization in the image turn.
std::string image_answer_instruction(std::string_view marker);

/// Text that accompanies a direct rendering of the input (no model code).
std::string rendered_input_instruction(std::string_view marker);

}  // namespace wot::strategy::prompts
