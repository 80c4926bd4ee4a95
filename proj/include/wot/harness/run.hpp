#pragma once

#include "wot/harness/config.hpp"
#include "wot/harness/record.hpp"
#include "wot/llm/client.hpp"
#include "wot/sandbox/execution.hpp"

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <vector>

namespace wot::harness {

/// The run directory already holds records and resume was not requested.
class RunExists : public ConfigError {
public:
    using ConfigError::ConfigError;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct RunHooks {
    /// Called on the writer thread after each record is durably appended.
    /// An exception thrown here stops the run and propagates out of run_eval.
    std::function<void(const RunRecord&)> on_record;
};

struct RunOutcome {
    std::filesystem::path run_dir;
    /// Every record in the store, including ones from earlier attempts.
    std::vector<RunRecord> records;
    std::size_t executed = 0;
    std::size_t skipped = 0;
    std::size_t repaired_bytes = 0;
    llm::UsageTotals totals;
};

/// kExitPartial when any record failed on the provider side, else kExitOk.
int exit_code(const RunOutcome& outcome);

/// Directory-safe form of an instance id; unsafe ids get a digest suffix.
std::string instance_slug(const std::string& instance_id);

/// Drives one instance through the strategy and persists its transcript
/// and artifacts under `run_dir`. Provider and sandbox failures become
/// error categories on the record; nothing is thrown for them.
RunRecord run_instance(const TaskInstance& instance, const RunConfig& config, llm::Client& client,
                       sandbox::Sandbox& sandbox, const std::filesystem::path& run_dir);

/// Runs every instance not already recorded with `max_concurrency` workers.
/// Records are appended by a single writer in completion order.
RunOutcome run_eval(const RunConfig& config, const std::vector<TaskInstance>& instances, llm::Client& client,
                    const RunHooks& hooks = {});

/// Loads the dataset and builds the client from the config.
RunOutcome run_eval(const RunConfig& config, const RunHooks& hooks = {});

}  // namespace wot::harness
