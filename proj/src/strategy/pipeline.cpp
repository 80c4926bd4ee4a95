#include "wot/strategy/pipeline.hpp"

#include "wot/common/digest.hpp"
#include "wot/strategy/extract.hpp"
#include "wot/strategy/prompts.hpp"

namespace wot::strategy {

using llm::ChatMessage;
using llm::Role;

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::direct: return "direct";
        case StrategyKind::cot: return "cot";
        case StrategyKind::wot: return "wot";
        case StrategyKind::fixed_render: return "fixed_render";
    }
    return "wot";
}

StrategyKind parse_strategy_kind(std::string_view text) {
    if (text == "direct") return StrategyKind::direct;
    if (text == "cot") return StrategyKind::cot;
    if (text == "wot") return StrategyKind::wot;
    if (text == "fixed_render") return StrategyKind::fixed_render;
    throw std::invalid_argument("unknown strategy: " + std::string(text));
}

void validate(const TaskProfile& profile) {
    if (profile.viz_tool_name.empty()) throw std::invalid_argument("profile viz_tool_name must be nonempty");
    if (profile.fence_tag.empty()) throw std::invalid_argument("profile fence_tag must be nonempty");
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::start: return "start";
        case Stage::awaiting_code: return "awaiting_code";
        case Stage::awaiting_execution: return "awaiting_execution";
        case Stage::awaiting_image_answer: return "awaiting_image_answer";
        case Stage::awaiting_cot_extraction: return "awaiting_cot_extraction";
        case Stage::done: return "done";
        case Stage::failed: return "failed";
    }
    return "failed";
}

llm::Usage Transcript::usage() const {
    llm::Usage total;
    for (const auto& e : exchanges) total += e.response.usage;
    return total;
}

nlohmann::json to_json(const Transcript& t) {
    nlohmann::json exchanges = nlohmann::json::array();
    for (std::size_t i = 0; i < t.exchanges.size(); ++i) {
        const auto& e = t.exchanges[i];
        nlohmann::json request = nlohmann::json::array();
        for (const auto& m : e.request) request.push_back(llm::to_transcript_json(m));
        exchanges.push_back({{"turn", i},
                             {"request", std::move(request)},
                             {"params", llm::to_json(e.params)},
                             {"response",
                              {{"text", e.response.text},
                               {"finish_reason", llm::to_string(e.response.finish_reason)},
                               {"usage", llm::to_json(e.response.usage)},
                               {"attempts", e.response.attempts}}}});
    }
    nlohmann::json executions = nlohmann::json::array();
    for (const auto& r : t.executions) executions.push_back(sandbox::to_json(r));
    nlohmann::json stages = nlohmann::json::array();
    for (Stage s : t.stages) stages.push_back(to_string(s));
    return {{"exchanges", std::move(exchanges)},
            {"scripts", t.scripts},
            {"executions", std::move(executions)},
            {"image_digests", t.image_digests},
            {"stages", std::move(stages)}};
}

PipelineState start_pipeline(const Strategy& strategy) {
    PipelineState s;
    s.strategy = strategy;
    s.transcript.stages.push_back(Stage::start);
    return s;
}

bool expects_completion(StrategyKind kind, Stage stage) {
    switch (kind) {
        case StrategyKind::direct: return stage == Stage::start;
        case StrategyKind::cot: return stage == Stage::start || stage == Stage::awaiting_cot_extraction;
        case StrategyKind::wot: return stage == Stage::start || stage == Stage::awaiting_image_answer;
        case StrategyKind::fixed_render: return stage == Stage::awaiting_image_answer;
    }
    return false;
}

llm::GenerationParams params_for(Stage stage) {
    return llm::default_params(stage == Stage::awaiting_image_answer ? llm::ParamStage::image_followup
                                                                     : llm::ParamStage::initial);
}

namespace {

std::string with_suffixes(const std::string& input, const std::vector<std::string>& suffixes) {
    std::string text = input;
    if (!suffixes.empty()) {
        text += "\n";
        for (const auto& s : suffixes) {
            text += "\n";
            text += s;
        }
    }
    return text;
}

std::string cot_first_turn(const TaskInstance& instance) {
    return instance.input + "\n\n" + std::string(prompts::kStepByStep);
}

ChatMessage image_message(const llm::ImagePart& image, std::string text) {
    ChatMessage m;
    m.role = Role::user;
    m.parts.emplace_back(image);
    m.parts.emplace_back(llm::TextPart{std::move(text)});
    return m;
}

const llm::ImagePart& require_image(const llm::ImagePart* image) {
    if (image == nullptr) throw IllegalStage("image turn requires a rendered image");
    return *image;
}

}  // namespace

std::vector<ChatMessage> build_messages(const Strategy& strategy, Stage stage, const TaskInstance& instance,
                                        const TaskProfile& profile, const Transcript& prior,
                                        const llm::ImagePart* image) {
    if (!expects_completion(strategy.kind, stage)) {
        throw IllegalStage("strategy " + std::string(to_string(strategy.kind)) + " sends no request at stage " +
                           std::string(to_string(stage)));
    }
    const std::string& marker = profile.answer_marker;

    switch (strategy.kind) {
        case StrategyKind::direct:
            return {ChatMessage::text(Role::system, std::string(prompts::kDirectSystem)),
                    ChatMessage::text(Role::user, instance.input)};

        case StrategyKind::cot:
            if (stage == Stage::start) {
                return {ChatMessage::text(Role::user, cot_first_turn(instance))};
            }
            if (prior.exchanges.empty()) throw IllegalStage("cot extraction needs the reasoning turn");
            return {ChatMessage::text(Role::user, cot_first_turn(instance)),
                    ChatMessage::text(Role::assistant, prior.exchanges.front().response.text),
                    ChatMessage::text(Role::user, prompts::cot_answer_extraction(marker))};

        case StrategyKind::wot: {
            const ChatMessage system =
                ChatMessage::text(Role::system, prompts::visualization_system(profile.viz_tool_name));
            const ChatMessage query =
                ChatMessage::text(Role::user, with_suffixes(instance.input, profile.user_prompt_suffixes));
            if (stage == Stage::start) return {system, query};

            const auto& img = require_image(image);
            if (strategy.include_history_in_image_turn) {
                if (prior.exchanges.empty()) throw IllegalStage("history requested but no code turn recorded");
                return {system, query, ChatMessage::text(Role::assistant, prior.exchanges.front().response.text),
                        image_message(img, prompts::image_answer_instruction(marker))};
            }
            return {image_message(img, instance.input + "\n\n" + prompts::image_answer_instruction(marker))};
        }

        case StrategyKind::fixed_render:
            return {image_message(require_image(image),
                                  instance.input + "\n\n" + prompts::rendered_input_instruction(marker))};
    }
    throw IllegalStage("unknown strategy");
}

std::vector<ChatMessage> build_messages(const PipelineState& state, const TaskInstance& instance,
                                        const TaskProfile& profile) {
    const llm::ImagePart* image = state.pending_image ? &*state.pending_image : nullptr;
    return build_messages(state.strategy, state.stage, instance, profile, state.transcript, image);
}

namespace {

[[noreturn]] void illegal(const PipelineState& s, std::string_view event) {
    throw IllegalTransition("strategy " + std::string(to_string(s.strategy.kind)) + " cannot take " +
                            std::string(event) + " at stage " + std::string(to_string(s.stage)));
}

void enter(PipelineState& s, Stage stage) {
    s.stage = stage;
    s.transcript.stages.push_back(stage);
}

void finish(PipelineState& s, const TaskProfile& profile) {
    s.prediction = extract_final_answer(s.transcript.exchanges.back().response.text, profile.answer_marker);
    s.pending_image.reset();
    enter(s, Stage::done);
}

}  // namespace

PipelineState fail(PipelineState s, ErrorCategory category, std::string detail) {
    if (s.finished()) {
        throw IllegalTransition("cannot fail a pipeline at stage " + std::string(to_string(s.stage)));
    }
    s.error = category;
    s.error_detail = std::move(detail);
    s.pending_script.reset();
    s.pending_image.reset();
    enter(s, Stage::failed);
    return s;
}

PipelineState advance(PipelineState s, const Event& event, const TaskProfile& profile) {
    if (s.finished()) illegal(s, "any event");
    const StrategyKind kind = s.strategy.kind;

    if (const auto* c = std::get_if<CompletionEvent>(&event)) {
        if (!expects_completion(kind, s.stage)) illegal(s, "a completion");
        s.transcript.exchanges.push_back({c->request, c->params, c->response});

        switch (kind) {
            case StrategyKind::direct:
                finish(s, profile);
                return s;
            case StrategyKind::cot:
                if (s.stage == Stage::start) {
                    enter(s, Stage::awaiting_cot_extraction);
                } else {
                    finish(s, profile);
                }
                return s;
            case StrategyKind::wot:
                if (s.stage == Stage::start) {
                    enter(s, Stage::awaiting_code);
                    auto code = extract_code(c->response.text, profile.fence_tag);
                    if (!code) {
                        return fail(std::move(s), ErrorCategory::no_code, "no ```" + profile.fence_tag + " block");
                    }
                    s.transcript.scripts.push_back(*code);
                    s.pending_script = std::move(code);
                    enter(s, Stage::awaiting_execution);
                } else {
                    finish(s, profile);
                }
                return s;
            case StrategyKind::fixed_render:
                finish(s, profile);
                return s;
        }
    }

    if (const auto* e = std::get_if<ExecutionEvent>(&event)) {
        if (kind != StrategyKind::wot || s.stage != Stage::awaiting_execution || !s.pending_script) {
            illegal(s, "an execution result");
        }
        s.transcript.executions.push_back(e->result);
        s.pending_script.reset();
        if (e->result.status != sandbox::ExecutionStatus::ok) {
            return fail(std::move(s), ErrorCategory::code_execution,
                        "execution " + std::string(sandbox::to_string(e->result.status)));
        }
        return s;
    }

    const auto& ready = std::get<ImageReadyEvent>(event);
    const bool wot_ready = kind == StrategyKind::wot && s.stage == Stage::awaiting_execution &&
                           !s.pending_script && !s.transcript.executions.empty() &&
                           s.transcript.executions.back().status == sandbox::ExecutionStatus::ok;
    const bool fixed_ready = kind == StrategyKind::fixed_render && s.stage == Stage::start;
    if (!wot_ready && !fixed_ready) illegal(s, "an image");
    s.transcript.image_digests.push_back(sha256_hex(ready.image.bytes));
    s.pending_image = ready.image;
    enter(s, Stage::awaiting_image_answer);
    return s;
}

}  // namespace wot::strategy
