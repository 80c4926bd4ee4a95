#include "doctest.h"
#include "harness_fixtures.hpp"

#include "wot/common/digest.hpp"
#include "wot/harness/aggregate.hpp"
#include "wot/harness/datasets.hpp"
#include "wot/harness/report.hpp"
#include "wot/harness/run.hpp"
#include "wot/harness/taxonomy.hpp"
#include "wot/nav/generate.hpp"
#include "wot/nav/serialize.hpp"
#include "wot/strategy/prompts.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <set>

using namespace wot;
using namespace wot::harness;
namespace fs = std::filesystem;

namespace {

RunOutcome run_with(const RunConfig& cfg, const RunHooks& hooks = {}) {
    const auto instances = load_instances(cfg.task, cfg.dataset);
    llm::Client client(cfg.provider);
    return run_eval(cfg, instances, client, hooks);
}

std::vector<std::string> deterministic_lines(const fs::path& records_file) {
    std::vector<std::string> out;
    for (const auto& r : read_records(records_file)) out.push_back(deterministic_view(r).dump());
    return out;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const std::string cmd = std::string(WOT_CLI) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult r;
    char buf[4096];
    while (const auto n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

RunRecord synthetic(const std::string& id, bool correct, std::optional<ErrorCategory> category = {},
                    std::optional<std::string> status = {}, std::map<std::string, std::string> metadata = {}) {
    RunRecord r;
    r.instance_id = id;
    r.strategy = "wot";
    r.task = "ascii_word";
    r.target = "cat";
    r.prediction = correct ? "cat" : "dog";
    r.correct = correct;
    r.error_category = category;
    r.execution_status = std::move(status);
    r.artifacts = {"artifacts/" + id + "/fig_0.png", "artifacts/" + id + "/query.png"};
    r.metadata = std::move(metadata);
    return r;
}

}  // namespace

TEST_CASE("run config parsing and validation") {
    const auto dir = test::scratch_dir("harness_config");
    test::write_text(dir / "cfg.json", R"({
        "run_id": "word-wot",
        "strategy": {"kind": "wot"},
        "task": {"kind": "ascii_word", "dataset": "data/word.jsonl"},
        "provider": {"kind": "mock", "fixture_path": "fixtures/wot.jsonl"},
        "sandbox": {"runner_command": ["./runner"], "timeout_seconds": 5},
        "max_concurrency": 3
    })");
    const auto cfg = load_run_config(dir / "cfg.json");
    CHECK(cfg.run_id == "word-wot");
    CHECK(cfg.strategy.kind == strategy::StrategyKind::wot);
    CHECK_FALSE(cfg.strategy.include_history_in_image_turn);
    CHECK(cfg.dataset == dir / "data/word.jsonl");
    CHECK(cfg.provider.fixture_path == dir / "fixtures/wot.jsonl");
    CHECK(cfg.sandbox.runner_command.front() == (dir / "./runner").string());
    CHECK(cfg.max_concurrency == 3);
    CHECK(cfg.postprocess.border_px == 32);
    CHECK(task_profile(cfg).viz_tool_name == "Matplotlib");

    auto j = test::run_config_json("ok", "direct", "d.jsonl", "f.jsonl", "runs");
    CHECK_NOTHROW(run_config_from_json(j));
    j["run_id"] = "../escape";
    CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    j["run_id"] = "ok";
    j["max_concurrency"] = 0;
    CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    j["max_concurrency"] = 1;
    j["strategy"] = "wot";
    j["sandbox"] = nlohmann::json::object();
    CHECK_THROWS_AS(run_config_from_json(j), ConfigError);
    CHECK(filesystem_safe("run_01.a-b"));
    CHECK_FALSE(filesystem_safe("a/b"));
    CHECK_FALSE(filesystem_safe(".."));
}

TEST_CASE("datasets and scoring") {
    const auto dir = test::scratch_dir("harness_datasets");
    const auto word = load_instances(TaskKind::ascii_word, test::word_dataset(dir));
    CHECK(word.size() == 5);
    CHECK_THROWS_AS(load_instances(TaskKind::ascii_mnist, test::word_dataset(dir)), DatasetError);
    CHECK_THROWS_AS(load_instances(TaskKind::ascii_word, dir / "missing.jsonl"), DatasetError);

    TaskInstance digit{"m", TaskKind::ascii_mnist, "", "7", {}};
    CHECK(score(digit, " 7"));
    CHECK_FALSE(score(digit, "seven"));
    TaskInstance w{"w", TaskKind::ascii_word, "", "hello", {}};
    CHECK(score(w, "HELLO"));
    CHECK_FALSE(score(w, "hello."));

    auto batch = nav::generate_batch(nav::WorldKind::hexagon, 3, 4, 1);
    nav::write_nav_jsonl(dir / "nav.jsonl", batch);
    const auto nav_items = load_instances(TaskKind::navigation, dir / "nav.jsonl");
    REQUIRE(nav_items.size() == 3);
    CHECK(nav_items[0].metadata.at("kind") == "hexagon");
    auto j = nav::to_json(batch[0]);
    j["target"] = "definitely-wrong";
    test::write_text(dir / "bad.jsonl", j.dump() + "\n");
    CHECK_THROWS_AS(load_instances(TaskKind::navigation, dir / "bad.jsonl"), DatasetError);
}

TEST_CASE("end to end per strategy with mock provider and stub runner") {
    const auto dir = test::scratch_dir("harness_e2e");
    const auto dataset = test::word_dataset(dir);
    const std::map<std::string, long> expected_calls = {{"direct", 1}, {"cot", 2}, {"wot", 2}};
    for (const auto& [name, calls] : expected_calls) {
        CAPTURE(name);
        const auto cfg = test::run_config(name, name, dataset, test::mock_fixture(name), dir / "runs");
        const auto outcome = run_with(cfg);
        REQUIRE(outcome.records.size() == 5);
        CHECK(outcome.executed == 5);
        CHECK(exit_code(outcome) == kExitOk);
        llm::Usage sum;
        int correct = 0;
        for (const auto& r : outcome.records) {
            CHECK(r.calls == calls);
            CHECK(r.strategy == name);
            CHECK(r.prompt_set_version == strategy::prompts::kPromptSetVersion);
            CHECK(fs::exists(outcome.run_dir / r.transcript_ref));
            CHECK(sha256_hex(test::slurp(outcome.run_dir / r.transcript_ref)) == r.transcript_digest);
            if (r.correct) {
                ++correct;
                CHECK_FALSE(r.error_category.has_value());
            }
            sum += r.usage;
        }
        CHECK(correct == 4);
        CHECK(sum == outcome.totals.usage);
        CHECK(outcome.totals.calls == 5 * calls);
        if (name == "wot") {
            for (const auto& r : outcome.records) {
                CHECK(r.execution_status == "ok");
                for (const auto& a : r.artifacts) CHECK(fs::exists(outcome.run_dir / a));
                CHECK(r.artifacts.size() == 3);
                if (!r.correct) CHECK(r.error_category == ErrorCategory::needs_review);
            }
            CHECK_FALSE(fs::exists(outcome.run_dir / "work" / "word-0"));
        }
    }
}

TEST_CASE("identical configs give identical records and transcripts") {
    const auto dir = test::scratch_dir("harness_determinism");
    const auto dataset = test::word_dataset(dir);
    for (const std::string name : {"direct", "cot", "wot"}) {
        const auto a = run_with(test::run_config(name, name, dataset, test::mock_fixture(name), dir / "a"));
        const auto b = run_with(test::run_config(name, name, dataset, test::mock_fixture(name), dir / "b"));
        CHECK(deterministic_lines(a.run_dir / "records.jsonl") == deterministic_lines(b.run_dir / "records.jsonl"));
        for (const auto& r : a.records) {
            CHECK(test::slurp(a.run_dir / r.transcript_ref) == test::slurp(b.run_dir / r.transcript_ref));
        }
    }
}

TEST_CASE("concurrency does not change outcomes") {
    const auto dir = test::scratch_dir("harness_concurrency");
    const auto dataset = test::word_dataset(dir);
    const auto serial = run_with(test::run_config("s", "wot", dataset, test::mock_fixture("wot"), dir / "runs", 1));
    const auto parallel = run_with(test::run_config("p", "wot", dataset, test::mock_fixture("wot"), dir / "runs", 4));
    std::set<std::string> a;
    std::set<std::string> b;
    for (const auto& r : serial.records) a.insert(deterministic_view(r).dump());
    for (const auto& r : parallel.records) b.insert(deterministic_view(r).dump());
    CHECK(a == b);
}

TEST_CASE("resume after a simulated crash adds only missing records") {
    const auto dir = test::scratch_dir("harness_resume");
    const auto dataset = test::word_dataset(dir);
    auto cfg = test::run_config("r", "cot", dataset, test::mock_fixture("cot"), dir / "runs");
    struct Crash {};
    int seen = 0;
    RunHooks crash_after_two{[&](const RunRecord&) {
        if (++seen == 2) throw Crash{};
    }};
    CHECK_THROWS_AS(run_with(cfg, crash_after_two), Crash);
    const auto records_file = cfg.run_dir() / "records.jsonl";
    CHECK(read_records(records_file).size() == 2);

    CHECK_THROWS_AS(run_with(cfg), RunExists);

    {
        std::ofstream torn(records_file, std::ios::app);
        torn << R"({"instance_id":"word-4","strat)";
    }
    cfg.resume = true;
    const auto outcome = run_with(cfg);
    CHECK(outcome.skipped == 2);
    CHECK(outcome.executed == 3);
    CHECK(outcome.repaired_bytes > 0);
    REQUIRE(outcome.records.size() == 5);
    std::set<std::string> ids;
    for (const auto& r : read_records(records_file)) ids.insert(r.instance_id);
    CHECK(ids.size() == 5);
    CHECK(read_records(records_file).size() == 5);

    const auto again = run_with(cfg);
    CHECK(again.executed == 0);
    CHECK(again.skipped == 5);
}

TEST_CASE("per-instance failures are recorded with their categories") {
    const auto dir = test::scratch_dir("harness_failures");
    auto cfg = test::run_config("f", "wot", test::data_dir() / "ascii" / "failure_word.jsonl",
                                test::mock_fixture("failures"), dir / "runs", 3);
    const auto outcome = run_with(cfg);
    REQUIRE(outcome.records.size() == 7);
    std::map<std::string, RunRecord> by_id;
    for (const auto& r : outcome.records) by_id[r.instance_id] = r;

    CHECK(by_id["f-nocode"].error_category == ErrorCategory::no_code);
    CHECK(by_id["f-nocode"].calls == 1);
    CHECK_FALSE(by_id["f-nocode"].correct);
    CHECK(by_id["f-timeout"].error_category == ErrorCategory::code_execution);
    CHECK(by_id["f-timeout"].execution_status == "timeout");
    CHECK(by_id["f-error"].execution_status == "runtime_error");
    CHECK(by_id["f-nodraw"].execution_status == "no_image");
    CHECK(by_id["f-filtered"].error_category == ErrorCategory::content_filtered);
    CHECK(by_id["f-filtered"].usage == llm::Usage{40, 0});
    CHECK(by_id["f-wrong"].error_category == ErrorCategory::needs_review);
    CHECK(by_id["f-wrong"].calls == 2);
    CHECK(by_id["f-missing"].error_category == ErrorCategory::provider_error);
    for (const auto& r : outcome.records) {
        CHECK_FALSE(r.correct);
        if (r.error_category == ErrorCategory::code_execution) CHECK(r.calls == 1);
    }
    llm::Usage sum;
    for (const auto& r : outcome.records) sum += r.usage;
    CHECK(sum == outcome.totals.usage);
    CHECK(exit_code(outcome) == kExitPartial);

    const auto breakdown = classify_errors(outcome.records);
    CHECK(breakdown.counts.at(ErrorCategory::code_execution) == 4);
    CHECK(breakdown.counts.at(ErrorCategory::content_filtered) == 1);
    CHECK(breakdown.counts.at(ErrorCategory::provider_error) == 1);
    CHECK(breakdown.counts.at(ErrorCategory::needs_review) == 1);
    REQUIRE(breakdown.worklist.size() == 1);
    CHECK(breakdown.worklist[0].image_ref == "artifacts/f-wrong/query.png");
}

TEST_CASE("fixed render strategy sends the rasterized input") {
    const auto dir = test::scratch_dir("harness_fixed");
    const auto dataset = test::word_dataset(dir);
    std::string fixture;
    for (int i = 0; i < 5; ++i) {
        fixture += nlohmann::json{{"instance_id", "word-" + std::to_string(i)},
                                  {"turn", 0},
                                  {"text", "Answer: hello world"},
                                  {"image", true}}
                       .dump() +
                   "\n";
    }
    test::write_text(dir / "fixed.jsonl", fixture);
    const auto outcome = run_with(test::run_config("fx", "fixed_render", dataset, dir / "fixed.jsonl", dir / "runs"));
    REQUIRE(outcome.records.size() == 5);
    for (const auto& r : outcome.records) {
        CHECK(r.calls == 1);
        CHECK(r.error_category == ErrorCategory::needs_review);
        CHECK(fs::exists(outcome.run_dir / "artifacts" / r.instance_id / "render.png"));
        CHECK(fs::exists(outcome.run_dir / "artifacts" / r.instance_id / "query.png"));
    }
}

TEST_CASE("instance slugs stay inside the run directory") {
    CHECK(instance_slug("word-1") == "word-1");
    const auto slug = instance_slug("../../etc/passwd");
    CHECK(slug.find('/') == std::string::npos);
    CHECK(slug != instance_slug("../../etc/passwe"));
}

TEST_CASE("accuracy arithmetic") {
    std::vector<RunRecord> four = {synthetic("a", true), synthetic("b", true), synthetic("c", false),
                                   synthetic("d", false)};
    CHECK(aggregate(four).overall.accuracy_text == "50.0");
    CHECK(percent_one_decimal(1, 3) == doctest::Approx(33.3));
    CHECK(percent_one_decimal(2, 3) == doctest::Approx(66.7));
    CHECK(percent_one_decimal(1, 16) == doctest::Approx(6.3));
    CHECK(percent_one_decimal(1, 8) == doctest::Approx(12.5));
    CHECK(format_percent(100.0) == "100.0");
    CHECK_THROWS_AS(aggregate({}), EmptyRecords);
    CHECK_THROWS_AS(percent_one_decimal(0, 0), EmptyRecords);
}

TEST_CASE("grouped accuracy is consistent with the overall row") {
    std::vector<RunRecord> records;
    const std::vector<std::string> fonts = {"3d", "basic", "bubble", "doh", "dot_matrix", "unknown"};
    Rng rng(3);
    for (int i = 0; i < 97; ++i) {
        records.push_back(synthetic("r" + std::to_string(i), rng.below(3) == 0, {}, {},
                                    {{"font_category", fonts[rng.below(fonts.size())]}}));
    }
    const auto table = aggregate(records, by_metadata("font_category"));
    CHECK(table.rows.size() == 5);
    long n = 0;
    long correct = 0;
    for (const auto& row : table.rows) {
        CHECK(row.key != "unknown");
        n += row.n;
        correct += row.correct;
    }
    CHECK(n == table.overall.n);
    CHECK(correct == table.overall.correct);
    CHECK(table.overall.accuracy == percent_one_decimal(correct, n));
    CHECK(aggregate(records).overall.n == 97);
}

TEST_CASE("error taxonomy rules") {
    const std::vector<RunRecord> records = {
        synthetic("ok", true),
        synthetic("timeout", false, ErrorCategory::code_execution, "timeout"),
        synthetic("noimage", false, ErrorCategory::code_execution, "no_image"),
        synthetic("nocode", false, ErrorCategory::no_code),
        synthetic("wrong", false, ErrorCategory::needs_review, "ok"),
        synthetic("labeled", false, ErrorCategory::needs_review, "ok"),
        synthetic("blocked", false, ErrorCategory::content_filtered),
    };
    const auto unlabeled = classify_errors(records);
    CHECK(unlabeled.incorrect == 6);
    CHECK(unlabeled.assignments.at("timeout") == ErrorCategory::code_execution);
    CHECK(unlabeled.assignments.at("noimage") == ErrorCategory::code_execution);
    CHECK(unlabeled.assignments.at("nocode") == ErrorCategory::code_execution);
    CHECK(unlabeled.assignments.at("wrong") == ErrorCategory::needs_review);
    CHECK(unlabeled.assignments.at("blocked") == ErrorCategory::content_filtered);
    CHECK(unlabeled.assignments.count("ok") == 0);
    CHECK(unlabeled.worklist.size() == 2);

    const auto labeled = classify_errors(records, {{"labeled", "visual_perception"}, {"wrong", "poor_visualization"}});
    CHECK(labeled.assignments.at("labeled") == ErrorCategory::visual_perception);
    CHECK(labeled.assignments.at("wrong") == ErrorCategory::poor_visualization);
    CHECK(labeled.worklist.empty());
    CHECK(labeled.counts.at(ErrorCategory::code_execution) == 3);

    const auto timeout_label = classify_errors(records, {{"timeout", "visual_perception"}});
    CHECK(timeout_label.assignments.at("timeout") == ErrorCategory::code_execution);

    CHECK_THROWS_AS(classify_errors(records, {{"wrong", "bad_luck"}}), UnknownLabel);
    CHECK_THROWS_AS(classify_errors(records, {{"wrong", "code_execution"}}), UnknownLabel);
}

TEST_CASE("reference values") {
    CHECK(reference_value("ascii", "wot", "ascii_mnist").value == 66.0);
    CHECK(reference_value("ascii", "wot", "ascii_kanji").value == 73.8);
    CHECK(reference_value("navigation", "cot", "hexagon").value == 8);
    CHECK(reference_value("navigation", "direct", "avg").value == 33);
    CHECK(reference_value("font", "wot", "dot_matrix").value == 11.8);
    CHECK(reference_value("fixed_render", "fixed_render", "ascii_word").value == 22.0);
    CHECK(reference_value("real_images", "real_images", "ascii_mnist").value == 80.8);
    CHECK_THROWS_AS(reference_value("ascii", "fixed_render", "ascii_mnist"), MissingReference);
    CHECK(reference_values().size() == 9 + 15 + 18 + 2);
}

TEST_CASE("report renders measured values, usage and error counts") {
    const auto dir = test::scratch_dir("harness_report");
    const auto dataset = test::word_dataset(dir);
    const auto outcome = run_with(test::run_config("rep", "wot", dataset, test::mock_fixture("wot"), dir / "runs"));
    const auto summary = summarize_run(outcome.run_dir);
    CHECK(summary.accuracy.overall.accuracy_text == "80.0");
    REQUIRE(summary.breakdown.has_value());
    CHECK(summary.breakdown->rows.size() == 5);
    CHECK(summary.usage == outcome.totals.usage);
    const auto text = render_report({summary}, true);
    CHECK(text.find("accuracy 80.0% (4/5)") != std::string::npos);
    CHECK(text.find("needs_review=1") != std::string::npos);
    CHECK(text.find("73.8") != std::string::npos);
    CHECK(text.find("22.0") != std::string::npos);
    CHECK(text.find("80.8") != std::string::npos);
    const auto j = to_json(summary);
    CHECK(j["usage"]["prompt_tokens"] == outcome.totals.usage.prompt_tokens);
    CHECK(j["errors"]["counts"]["needs_review"] == 1);
}

TEST_CASE("command line: run, report, classify-errors and exit codes") {
    const auto dir = test::scratch_dir("harness_cli");
    const auto dataset = test::word_dataset(dir);
    test::write_text(dir / "direct.json",
                     test::run_config_json("cli-direct", "direct", dataset, test::mock_fixture("direct"), dir / "runs")
                         .dump());
    auto r = run_cli("run --config " + (dir / "direct.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("5 new") != std::string::npos);
    r = run_cli("run --config " + (dir / "direct.json").string());
    CHECK(r.exit_code == 1);
    r = run_cli("run --resume --config " + (dir / "direct.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0 new, 5 already recorded") != std::string::npos);

    r = run_cli("report --root " + (dir / "runs").string() + " --run cli-direct --compare-paper");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("accuracy 80.0%") != std::string::npos);
    CHECK(r.output.find("19.6") != std::string::npos);
    CHECK(fs::exists(dir / "runs" / "cli-direct" / "summary.json"));

    test::write_text(dir / "fail.json", test::run_config_json("cli-fail", "wot",
                                                              test::data_dir() / "ascii" / "failure_word.jsonl",
                                                              test::mock_fixture("failures"), dir / "runs", 4)
                                            .dump());
    r = run_cli("run --config " + (dir / "fail.json").string());
    CHECK(r.exit_code == 2);
    test::write_text(dir / "labels.json", R"({"f-wrong": "visual_perception"})");
    r = run_cli("classify-errors --run " + (dir / "runs" / "cli-fail").string() + " --labels " +
                (dir / "labels.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("visual_perception: 1") != std::string::npos);
    test::write_text(dir / "bad_labels.json", R"({"f-wrong": "cosmic_rays"})");
    r = run_cli("classify-errors --run " + (dir / "runs" / "cli-fail").string() + " --labels " +
                (dir / "bad_labels.json").string());
    CHECK(r.exit_code == 1);

    test::write_text(dir / "broken.json", R"({"run_id": "x"})");
    CHECK(run_cli("run --config " + (dir / "broken.json").string()).exit_code == 1);
}

TEST_CASE("command line: data preparation") {
    const auto dir = test::scratch_dir("harness_cli_data");
    auto r = run_cli("gen-nav --kind all --n 20 --steps 4 --seed 5 --out " + (dir / "nav.jsonl").string());
    CHECK(r.exit_code == 0);
    CHECK(nav::read_nav_jsonl(dir / "nav.jsonl").size() == 100);
    r = run_cli("gen-nav --kind square --n 3 --seed 5 --out " + (dir / "sq.jsonl").string());
    CHECK(r.exit_code == 0);
    CHECK(test::slurp(dir / "sq.jsonl").find("\"square\"") != std::string::npos);

    r = run_cli("import-data kanji " + (test::data_dir() / "ascii" / "kanji_task.json").string() + " " +
                (dir / "kanji.jsonl").string());
    CHECK(r.exit_code == 0);
    CHECK(ascii::read_jsonl(dir / "kanji.jsonl").size() == 5);
    r = run_cli("import-data word " + (test::data_dir() / "ascii" / "word_task.json").string() + " " +
                (dir / "word.jsonl").string() + " --subsample 3 --seed 1");
    CHECK(ascii::read_jsonl(dir / "word.jsonl").size() == 3);

    test::write_text(dir / "art.txt", "ab\ncd");
    r = run_cli("render-ascii " + (dir / "art.txt").string() + " " + (dir / "art.png").string() + " --margin 10");
    CHECK(r.exit_code == 0);
    const auto size = png_dimensions(dir / "art.png");
    CHECK(size.width == 36);
    CHECK(size.height == 52);
}
