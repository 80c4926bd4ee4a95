#pragma once

#include "wot/common/task.hpp"
#include "wot/llm/chat.hpp"
#include "wot/sandbox/execution.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wot::strategy {

enum class StrategyKind {
    direct,
    cot,
    wot,
    /// Input rasterized by the harness instead of model-written code.
    fixed_render,
};

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view text);

struct Strategy {
    StrategyKind kind = StrategyKind::wot;
    /// Image turn also carries the code-writing exchange. Only read for wot.
    bool include_history_in_image_turn = false;
};

struct TaskProfile {
    std::string viz_tool_name;
    std::string fence_tag = "python";
    std::vector<std::string> user_prompt_suffixes;
    std::string answer_marker = "Answer:";
    sandbox::RunnerProfile runner_profile = sandbox::RunnerProfile::plotting;
};

void validate(const TaskProfile& profile);

enum class Stage {
    start,
    awaiting_code,
    awaiting_execution,
    awaiting_image_answer,
    awaiting_cot_extraction,
    done,
    failed,
};

std::string_view to_string(Stage stage);

struct Exchange {
    std::vector<llm::ChatMessage> request;
    llm::GenerationParams params;
    llm::CompletionResponse response;
};

struct Transcript {
    std::vector<Exchange> exchanges;
    std::vector<std::string> scripts;
    std::vector<sandbox::ExecutionResult> executions;
    /// SHA-256 of each image payload sent to the model.
    std::vector<std::string> image_digests;
    /// Every stage entered, in order, starting with `start`.
    std::vector<Stage> stages;

    llm::Usage usage() const;
};

/// Deterministic form: no wall-clock fields.
nlohmann::json to_json(const Transcript& transcript);

struct PipelineState {
    Strategy strategy;
    Stage stage = Stage::start;
    Transcript transcript;
    std::optional<std::string> pending_script;
    std::optional<llm::ImagePart> pending_image;
    std::optional<std::string> prediction;
    std::optional<ErrorCategory> error;
    std::string error_detail;

    bool finished() const { return stage == Stage::done || stage == Stage::failed; }
};

PipelineState start_pipeline(const Strategy& strategy);

struct CompletionEvent {
    std::vector<llm::ChatMessage> request;
    llm::GenerationParams params;
    llm::CompletionResponse response;
};

struct ExecutionEvent {
    sandbox::ExecutionResult result;
};

struct ImageReadyEvent {
    llm::ImagePart image;
};

using Event = std::variant<CompletionEvent, ExecutionEvent, ImageReadyEvent>;

class IllegalStage : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IllegalTransition : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// True when `stage` is one where the strategy sends a request.
bool expects_completion(StrategyKind kind, Stage stage);

/// Messages for the request issued at `stage`. `image` is required for the
/// image turn. Throws IllegalStage when the strategy makes no request there.
std::vector<llm::ChatMessage> build_messages(const Strategy& strategy, Stage stage, const TaskInstance& instance,
                                             const TaskProfile& profile, const Transcript& prior,
                                             const llm::ImagePart* image = nullptr);

/// build_messages for the state's current stage and pending image.
std::vector<llm::ChatMessage> build_messages(const PipelineState& state, const TaskInstance& instance,
                                             const TaskProfile& profile);

/// Decoding parameters for the request issued at `stage`.
llm::GenerationParams params_for(Stage stage);

/// One step of the state machine:
///   direct:       start -completion-> done
///   cot:          start -completion-> awaiting_cot_extraction -completion-> done
///   wot:          start -completion-> awaiting_code -> awaiting_execution | failed(no_code)
///                 awaiting_execution -execution-> (ok: stays) | failed(code_execution)
///                 awaiting_execution -image_ready-> awaiting_image_answer -completion-> done
///   fixed_render: start -image_ready-> awaiting_image_answer -completion-> done
/// Throws IllegalTransition for any other (stage, event) pair.
PipelineState advance(PipelineState state, const Event& event, const TaskProfile& profile);

/// Moves a non-terminal state to failed; used for provider-side errors.
PipelineState fail(PipelineState state, ErrorCategory category, std::string detail);

}  // namespace wot::strategy
