#include "wot/harness/run.hpp"

#include "wot/ascii/rasterize.hpp"
#include "wot/common/digest.hpp"
#include "wot/common/image.hpp"
#include "wot/harness/datasets.hpp"
#include "wot/sandbox/postprocess.hpp"
#include "wot/strategy/prompts.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace wot::harness {

namespace fs = std::filesystem;

int exit_code(const RunOutcome& outcome) {
    for (const auto& r : outcome.records) {
        if (r.error_category == ErrorCategory::provider_error || r.error_category == ErrorCategory::content_filtered) {
            return kExitPartial;
        }
    }
    return kExitOk;
}

std::string instance_slug(const std::string& instance_id) {
    if (filesystem_safe(instance_id)) return instance_id;
    std::string slug;
    for (char c : instance_id.substr(0, 64)) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_';
        slug += ok ? c : '_';
    }
    return slug + "-" + sha256_hex(instance_id).substr(0, 12);
}

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

struct InstanceRun {
    const TaskInstance& instance;
    const RunConfig& config;
    llm::Client& client;
    sandbox::Sandbox& sandbox;
    fs::path run_dir;
    strategy::TaskProfile profile;
    std::string slug;
    std::vector<std::string> artifacts;
    llm::Usage refused_usage;
    int turn = 0;

    fs::path artifact_dir() const { return run_dir / "artifacts" / slug; }

    std::string keep(const fs::path& file) {
        const auto rel = fs::relative(file, run_dir).generic_string();
        artifacts.push_back(rel);
        return rel;
    }

    strategy::PipelineState request(strategy::PipelineState state) {
        auto messages = strategy::build_messages(state, instance, profile);
        const auto params = strategy::params_for(state.stage);
        try {
            auto response = client.complete({messages, params, {instance.id, turn++}});
            return strategy::advance(std::move(state), strategy::CompletionEvent{std::move(messages), params, response},
                                     profile);
        } catch (const llm::ContentFiltered& e) {
            refused_usage += e.usage();
            return strategy::fail(std::move(state), ErrorCategory::content_filtered, e.what());
        } catch (const llm::ClientError& e) {
            return strategy::fail(std::move(state), ErrorCategory::provider_error, e.what());
        }
    }

    strategy::PipelineState execute(strategy::PipelineState state) {
        const fs::path work = run_dir / "work" / slug;
        std::error_code ec;
        fs::remove_all(work, ec);
        const fs::path script_file = artifact_dir() / "script.py";
        write_atomically(script_file, *state.pending_script);
        keep(script_file);

        sandbox::ExecutionRequest req;
        req.script = *state.pending_script;
        req.profile = profile.runner_profile;
        req.timeout_seconds = config.sandbox.timeout_seconds;
        req.work_dir = work;
        req.runner_command = config.sandbox.runner_command;
        sandbox::ExecutionResult result;
        try {
            result = sandbox.execute(req);
        } catch (const sandbox::SpawnError& e) {
            fs::remove_all(work, ec);
            return strategy::fail(std::move(state), ErrorCategory::code_execution,
                                  std::string("runner could not start: ") + e.what());
        }
        for (auto& image : result.images) {
            const fs::path dest = artifact_dir() / image.path.filename();
            fs::copy_file(image.path, dest, fs::copy_options::overwrite_existing);
            image.path = dest;
            keep(dest);
        }
        fs::remove_all(work, ec);
        return strategy::advance(std::move(state), strategy::ExecutionEvent{std::move(result)}, profile);
    }

    strategy::PipelineState image_ready(strategy::PipelineState state) {
        llm::ImagePart payload;
        try {
            if (state.strategy.kind == strategy::StrategyKind::fixed_render) {
                const Image raster = ascii::rasterize_ascii(instance.input, ascii::embedded_font(),
                                                            config.render_margin_px);
                fs::create_directories(artifact_dir());
                const fs::path raw = artifact_dir() / "render.png";
                write_binary_file(raw, encode_png(raster));
                keep(raw);
                payload = sandbox::prepare_image(raster, config.postprocess);
            } else {
                payload = sandbox::prepare_for_query(state.transcript.executions.back(), config.postprocess);
            }
        } catch (const std::exception& e) {
            return strategy::fail(std::move(state), ErrorCategory::code_execution,
                                  std::string("image unusable: ") + e.what());
        }
        const fs::path sent = artifact_dir() / "query.png";
        write_binary_file(sent, payload.bytes);
        keep(sent);
        return strategy::advance(std::move(state), strategy::ImageReadyEvent{std::move(payload)}, profile);
    }

    RunRecord run() {
        const auto started = std::chrono::steady_clock::now();
        RunRecord record;
        record.timing.started_at = utc_timestamp();

        auto state = strategy::start_pipeline(config.strategy);
        while (!state.finished()) {
            if (strategy::expects_completion(state.strategy.kind, state.stage)) {
                state = request(std::move(state));
            } else if (state.stage == strategy::Stage::awaiting_execution && state.pending_script) {
                state = execute(std::move(state));
            } else {
                state = image_ready(std::move(state));
            }
        }

        const auto transcript_json = strategy::to_json(state.transcript);
        const std::string transcript_text = transcript_json.dump(2) + "\n";
        const fs::path transcript_file = run_dir / "transcripts" / (slug + ".json");
        write_atomically(transcript_file, transcript_text);

        record.instance_id = instance.id;
        record.strategy = std::string(strategy::to_string(state.strategy.kind));
        record.task = std::string(to_string(instance.kind));
        record.target = instance.target;
        record.prediction = state.prediction.value_or("");
        record.correct = state.stage == strategy::Stage::done && score(instance, record.prediction);
        record.error_category = state.error;
        record.error_detail = state.error_detail;
        const bool image_based = state.strategy.kind == strategy::StrategyKind::wot ||
                                 state.strategy.kind == strategy::StrategyKind::fixed_render;
        if (!record.correct && !record.error_category && image_based) {
            record.error_category = ErrorCategory::needs_review;
        }
        if (!state.transcript.executions.empty()) {
            record.execution_status = std::string(sandbox::to_string(state.transcript.executions.back().status));
        }
        record.transcript_digest = sha256_hex(transcript_text);
        record.transcript_ref = fs::relative(transcript_file, run_dir).generic_string();
        record.artifacts = artifacts;
        record.usage = state.transcript.usage();
        record.usage += refused_usage;
        record.calls = static_cast<long>(state.transcript.exchanges.size()) +
                       (state.error == ErrorCategory::content_filtered ? 1 : 0);
        record.metadata = instance.metadata;
        record.prompt_set_version = std::string(strategy::prompts::kPromptSetVersion);
        record.timing.finished_at = utc_timestamp();
        record.timing.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return record;
    }
};

}  // namespace

RunRecord run_instance(const TaskInstance& instance, const RunConfig& config, llm::Client& client,
                       sandbox::Sandbox& sandbox, const fs::path& run_dir) {
    InstanceRun run{instance, config, client, sandbox, run_dir, task_profile(config), instance_slug(instance.id), {},
                    {}, 0};
    return run.run();
}

RunOutcome run_eval(const RunConfig& config, const std::vector<TaskInstance>& instances, llm::Client& client,
                    const RunHooks& hooks) {
    validate(config);
    const fs::path run_dir = config.run_dir();
    const fs::path records_file = run_dir / "records.jsonl";
    if (fs::exists(records_file) && !config.resume) {
        throw RunExists("run " + config.run_id + " already exists at " + run_dir.string() +
                        "; set resume to continue it");
    }
    fs::create_directories(run_dir);
    write_atomically(run_dir / "config.json", to_json(config).dump(2) + "\n");

    RecordStore store(records_file);
    RunOutcome outcome;
    outcome.run_dir = run_dir;
    outcome.repaired_bytes = store.repaired_bytes();

    std::vector<const TaskInstance*> pending;
    for (const auto& instance : instances) {
        if (store.contains(instance.id)) {
            ++outcome.skipped;
        } else {
            pending.push_back(&instance);
        }
    }

    sandbox::Sandbox sandbox(config.sandbox.max_procs);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mutex;
    std::condition_variable ready;
    std::deque<RunRecord> queue;
    std::exception_ptr worker_error;
    std::size_t workers_left = 0;

    auto worker = [&] {
        for (;;) {
            if (stop) break;
            const std::size_t i = next++;
            if (i >= pending.size()) break;
            try {
                RunRecord record = run_instance(*pending[i], config, client, sandbox, run_dir);
                std::lock_guard lock(mutex);
                queue.push_back(std::move(record));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!worker_error) worker_error = std::current_exception();
                stop = true;
            }
            ready.notify_one();
        }
        std::lock_guard lock(mutex);
        --workers_left;
        ready.notify_one();
    };

    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(config.max_concurrency), std::max<std::size_t>(1, pending.size()));
    workers_left = n_workers;
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);

    std::exception_ptr writer_error;
    for (;;) {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] { return !queue.empty() || workers_left == 0; });
        if (queue.empty()) break;
        RunRecord record = std::move(queue.front());
        queue.pop_front();
        lock.unlock();
        if (writer_error) continue;
        try {
            store.append(record);
            ++outcome.executed;
            if (hooks.on_record) hooks.on_record(record);
        } catch (...) {
            writer_error = std::current_exception();
            stop = true;
        }
    }
    threads.clear();

    if (writer_error) std::rethrow_exception(writer_error);
    if (worker_error) std::rethrow_exception(worker_error);

    outcome.records = store.records();
    outcome.totals = client.totals();
    return outcome;
}

RunOutcome run_eval(const RunConfig& config, const RunHooks& hooks) {
    const auto instances = load_instances(config.task, config.dataset);
    llm::Client client(config.provider);
    return run_eval(config, instances, client, hooks);
}

}  // namespace wot::harness
