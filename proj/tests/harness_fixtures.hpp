#pragma once

#include "support.hpp"

#include "wot/ascii/ascii_task.hpp"
#include "wot/harness/config.hpp"

#include <nlohmann/json.hpp>

namespace wot::test {

/// First five word-recognition fixtures as an internal JSONL dataset.
inline std::filesystem::path word_dataset(const std::filesystem::path& dir) {
    auto items = ascii::import_bigbench(data_dir() / "ascii" / "word_task.json", ascii::AsciiKind::word);
    items.resize(5);
    const auto file = dir / "word5.jsonl";
    ascii::write_jsonl(file, items);
    return file;
}

inline nlohmann::json run_config_json(const std::string& run_id, const std::string& strategy,
                                      const std::filesystem::path& dataset, const std::filesystem::path& fixture,
                                      const std::filesystem::path& root, int concurrency = 1) {
    return {
        {"run_id", run_id},
        {"strategy", {{"kind", strategy}}},
        {"task", {{"kind", "ascii_word"}, {"dataset", dataset.string()}}},
        {"provider", {{"kind", "mock"}, {"fixture_path", fixture.string()}}},
        {"max_concurrency", concurrency},
        {"sandbox", {{"runner_command", stub_runner()}, {"timeout_seconds", 1.0}, {"max_procs", 4}}},
        {"artifact_root", root.string()},
    };
}

inline harness::RunConfig run_config(const std::string& run_id, const std::string& strategy,
                                     const std::filesystem::path& dataset, const std::filesystem::path& fixture,
                                     const std::filesystem::path& root, int concurrency = 1) {
    return harness::run_config_from_json(run_config_json(run_id, strategy, dataset, fixture, root, concurrency));
}

inline std::filesystem::path mock_fixture(const std::string& name) { return data_dir() / "mock" / (name + ".jsonl"); }

}  // namespace wot::test
