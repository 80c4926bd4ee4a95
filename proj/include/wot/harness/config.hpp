#pragma once

#include "wot/common/task.hpp"
#include "wot/llm/client.hpp"
#include "wot/sandbox/execution.hpp"
#include "wot/sandbox/postprocess.hpp"
#include "wot/strategy/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SandboxSettings {
    std::vector<std::string> runner_command;
    double timeout_seconds = 30.0;
    int max_procs = 4;
};

struct RunConfig {
    std::string run_id;
    strategy::Strategy strategy;
    TaskKind task = TaskKind::ascii_word;
    std::filesystem::path dataset;
    /// Overrides the task's default runner profile.
    std::optional<sandbox::RunnerProfile> profile;
    llm::ProviderConfig provider;
    sandbox::PostProcessConfig postprocess;
    int max_concurrency = 1;
    SandboxSettings sandbox;
    std::filesystem::path artifact_root = "runs";
    bool resume = false;
    /// Margin around the input for the fixed_render strategy.
    int render_margin_px = 16;

    std::filesystem::path run_dir() const { return artifact_root / run_id; }
};

bool filesystem_safe(std::string_view id);

/// Relative `dataset`, `provider.fixture_path` and `artifact_root` resolve
/// against `base_dir` (the config file's directory when loaded from disk),
/// as does the runner executable when it contains a '/'.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

void validate(const RunConfig& config);

/// Matplotlib for ASCII tasks, Turtle for navigation, with the profile override applied.
strategy::TaskProfile task_profile(const RunConfig& config);

}  // namespace wot::harness
