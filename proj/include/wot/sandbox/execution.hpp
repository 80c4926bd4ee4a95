#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wot::sandbox {

enum class RunnerProfile { plotting, turtle_graphics };

std::string_view to_string(RunnerProfile profile);
RunnerProfile parse_runner_profile(std::string_view text);

struct ExecutionRequest {
    std::string script;
    RunnerProfile profile = RunnerProfile::plotting;
    double timeout_seconds = 30.0;
    /// Must not exist yet, or be an empty directory.
    std::filesystem::path work_dir;
    /// Runner executable and leading arguments; the host appends
    /// `<profile> <script-file> <out-dir>`.
    std::vector<std::string> runner_command;
};

enum class ExecutionStatus { ok, timeout, runtime_error, no_image };

std::string_view to_string(ExecutionStatus status);
ExecutionStatus parse_execution_status(std::string_view text);

struct RasterArtifact {
    std::filesystem::path path;
    int width = 0;
    int height = 0;
};

struct ExecutionResult {
    ExecutionStatus status = ExecutionStatus::no_image;
    std::vector<RasterArtifact> images;
    std::string stdout_text;
    std::string stderr_text;
    double wall_seconds = 0.0;
    int exit_code = -1;  // -1 when killed by a signal
};

nlohmann::json to_json(const ExecutionResult& result);

class SpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runner exit codes shared with the viz runner.
inline constexpr int kRunnerOk = 0;
inline constexpr int kRunnerScriptError = 3;
inline constexpr int kRunnerNoImage = 4;

/// Runs untrusted scripts through an external runner process. The host only
/// ever writes the script to disk; it is never interpreted in-process.
///
/// Each call owns its work directory. The child gets its own process group,
/// stdin from /dev/null and cwd = work_dir; on timeout (and after a normal
/// exit) the whole group is SIGKILLed so no renderer outlives the call.
/// At most `max_procs` children run at once across all callers.
class Sandbox {
public:
    explicit Sandbox(int max_procs = 4);

    ExecutionResult execute(const ExecutionRequest& request);

private:
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// Free-function form using a process-wide sandbox with default limits.
ExecutionResult execute_script(const ExecutionRequest& request);

/// PNG files in `out_dir` ordered by the numeric k of `fig_<k>.png`, then by
/// name. Files that are not readable PNGs are skipped.
std::vector<RasterArtifact> collect_images(const std::filesystem::path& out_dir);

}  // namespace wot::sandbox
