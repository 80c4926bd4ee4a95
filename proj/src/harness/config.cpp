#include "wot/harness/config.hpp"

#include "wot/ascii/ascii_task.hpp"
#include "wot/nav/serialize.hpp"

#include <fstream>

namespace wot::harness {

namespace fs = std::filesystem;

bool filesystem_safe(std::string_view id) {
    if (id.empty() || id == "." || id == ".." || id.size() > 128) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_' || c == '.';
        if (!ok) return false;
    }
    return true;
}

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    RunConfig c;
    try {
        c.run_id = j.at("run_id").get<std::string>();
        if (j.contains("strategy")) {
            const auto& s = j["strategy"];
            if (s.is_string()) {
                c.strategy.kind = strategy::parse_strategy_kind(s.get<std::string>());
            } else {
                c.strategy.kind = strategy::parse_strategy_kind(s.at("kind").get<std::string>());
                c.strategy.include_history_in_image_turn = s.value("include_history_in_image_turn", false);
            }
        }
        const auto& task = j.at("task");
        c.task = parse_task_kind(task.at("kind").get<std::string>());
        c.dataset = resolve(base_dir, task.at("dataset").get<std::string>());
        if (j.contains("profile")) c.profile = sandbox::parse_runner_profile(j["profile"].get<std::string>());

        auto provider = j.value("provider", nlohmann::json::object());
        if (provider.contains("fixture_path")) {
            provider["fixture_path"] = resolve(base_dir, provider["fixture_path"].get<std::string>()).string();
        }
        c.provider = llm::provider_config_from_json(provider);
        if (j.contains("postprocess")) c.postprocess = sandbox::postprocess_config_from_json(j["postprocess"]);
        c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
        if (j.contains("sandbox")) {
            const auto& s = j["sandbox"];
            c.sandbox.runner_command = s.value("runner_command", std::vector<std::string>{});
            c.sandbox.timeout_seconds = s.value("timeout_seconds", c.sandbox.timeout_seconds);
            c.sandbox.max_procs = s.value("max_procs", c.sandbox.max_procs);
            if (!c.sandbox.runner_command.empty() && c.sandbox.runner_command.front().find('/') != std::string::npos) {
                c.sandbox.runner_command.front() = resolve(base_dir, c.sandbox.runner_command.front()).string();
            }
        }
        c.artifact_root = resolve(base_dir, j.value("artifact_root", std::string("runs")));
        c.resume = j.value("resume", false);
        c.render_margin_px = j.value("render_margin_px", c.render_margin_px);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid run config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid run config: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return run_config_from_json(j, path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j = {
        {"run_id", c.run_id},
        {"strategy",
         {{"kind", strategy::to_string(c.strategy.kind)},
          {"include_history_in_image_turn", c.strategy.include_history_in_image_turn}}},
        {"task", {{"kind", to_string(c.task)}, {"dataset", c.dataset.string()}}},
        {"provider", llm::to_json(c.provider)},
        {"postprocess", sandbox::to_json(c.postprocess)},
        {"max_concurrency", c.max_concurrency},
        {"sandbox",
         {{"runner_command", c.sandbox.runner_command},
          {"timeout_seconds", c.sandbox.timeout_seconds},
          {"max_procs", c.sandbox.max_procs}}},
        {"artifact_root", c.artifact_root.string()},
        {"resume", c.resume},
        {"render_margin_px", c.render_margin_px},
    };
    if (c.profile) j["profile"] = sandbox::to_string(*c.profile);
    return j;
}

void validate(const RunConfig& c) {
    if (!filesystem_safe(c.run_id)) throw ConfigError("run_id must match [A-Za-z0-9._-]+: '" + c.run_id + "'");
    if (c.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
    if (c.dataset.empty()) throw ConfigError("task.dataset is required");
    if (c.strategy.kind == strategy::StrategyKind::wot) {
        if (c.sandbox.runner_command.empty()) throw ConfigError("wot runs need sandbox.runner_command");
        if (!(c.sandbox.timeout_seconds > 0)) throw ConfigError("sandbox.timeout_seconds must be positive");
    }
    if (c.strategy.kind == strategy::StrategyKind::fixed_render && c.task == TaskKind::navigation) {
        throw ConfigError("fixed_render only applies to ASCII tasks");
    }
    if (c.sandbox.max_procs < 1) throw ConfigError("sandbox.max_procs must be >= 1");
    try {
        llm::validate(c.provider);
        sandbox::validate(c.postprocess);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

strategy::TaskProfile task_profile(const RunConfig& c) {
    auto profile = c.task == TaskKind::navigation ? nav::turtle_profile() : ascii::matplotlib_profile();
    if (c.profile && *c.profile != profile.runner_profile) {
        profile.runner_profile = *c.profile;
        profile.viz_tool_name = *c.profile == sandbox::RunnerProfile::plotting ? "Matplotlib" : "Turtle";
    }
    return profile;
}

}  // namespace wot::harness
