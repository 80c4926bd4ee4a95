#include "wot/ascii/ascii_task.hpp"
#include "wot/ascii/rasterize.hpp"
#include "wot/common/image.hpp"
#include "wot/harness/config.hpp"
#include "wot/harness/datasets.hpp"
#include "wot/harness/report.hpp"
#include "wot/harness/run.hpp"
#include "wot/nav/generate.hpp"
#include "wot/nav/serialize.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace wot;

namespace {

fs::path resolve_run(const std::string& run, const fs::path& root) {
    const fs::path direct(run);
    if (fs::exists(direct / "records.jsonl")) return direct;
    return root / run;
}

int import_data(const std::string& kind_text, const fs::path& src, const fs::path& dst, std::size_t subsample_n,
                std::uint64_t seed) {
    const auto kind = ascii::parse_ascii_kind(kind_text);
    auto instances = ascii::import_bigbench(src, kind);
    if (subsample_n > 0) instances = ascii::subsample(instances, subsample_n, seed);
    ascii::write_jsonl(dst, instances);
    std::cout << "wrote " << instances.size() << " " << ascii::to_string(kind) << " instances to " << dst << "\n";
    return 0;
}

int gen_nav(const std::string& kind_text, int n, int steps, std::uint64_t seed, const fs::path& out,
            const nav::GeneratorOptions& options) {
    std::vector<nav::WorldKind> kinds;
    if (kind_text == "all") {
        kinds.assign(std::begin(nav::kAllWorldKinds), std::end(nav::kAllWorldKinds));
    } else {
        kinds.push_back(nav::parse_world_kind(kind_text));
    }
    std::vector<nav::NavInstance> all;
    for (const auto kind : kinds) {
        auto batch = nav::generate_batch(kind, n, steps, seed, options);
        all.insert(all.end(), std::make_move_iterator(batch.begin()), std::make_move_iterator(batch.end()));
    }
    nav::write_nav_jsonl(out, all);
    std::cout << "wrote " << all.size() << " navigation instances to " << out << "\n";
    return 0;
}

int run(const fs::path& config_path, bool resume) {
    auto config = harness::load_run_config(config_path);
    if (resume) config.resume = true;
    const auto outcome = harness::run_eval(config);
    std::cout << "run " << config.run_id << ": " << outcome.executed << " new, " << outcome.skipped
              << " already recorded, " << outcome.records.size() << " total\n";
    if (outcome.repaired_bytes > 0) {
        std::cout << "dropped " << outcome.repaired_bytes << " bytes of an incomplete trailing record\n";
    }
    std::cout << "usage: prompt_tokens=" << outcome.totals.usage.prompt_tokens
              << " completion_tokens=" << outcome.totals.usage.completion_tokens << " calls=" << outcome.totals.calls
              << " attempts=" << outcome.totals.attempts << "\n";
    return harness::exit_code(outcome);
}

int report(const std::vector<std::string>& runs, const fs::path& root, bool compare, const std::string& labels_path) {
    const harness::Labels labels = labels_path.empty() ? harness::Labels{} : harness::load_labels(labels_path);
    std::vector<harness::RunSummary> summaries;
    for (const auto& r : runs) {
        const fs::path dir = resolve_run(r, root);
        auto summary = harness::summarize_run(dir, labels);
        std::ofstream(dir / "summary.json") << harness::to_json(summary).dump(2) << "\n";
        summaries.push_back(std::move(summary));
    }
    std::cout << harness::render_report(summaries, compare);
    return 0;
}

int classify(const std::string& run, const fs::path& root, const std::string& labels_path) {
    const fs::path dir = resolve_run(run, root);
    const harness::Labels labels = labels_path.empty() ? harness::Labels{} : harness::load_labels(labels_path);
    const auto breakdown = harness::classify_errors(harness::read_records(dir / "records.jsonl"), labels);
    std::cout << "incorrect: " << breakdown.incorrect << "\n";
    for (const auto& [category, n] : breakdown.counts) std::cout << "  " << to_string(category) << ": " << n << "\n";
    nlohmann::json worklist = nlohmann::json::array();
    for (const auto& item : breakdown.worklist) {
        worklist.push_back({{"instance_id", item.instance_id},
                            {"image_ref", item.image_ref},
                            {"prediction", item.prediction},
                            {"target", item.target}});
    }
    std::ofstream(dir / "review_worklist.json") << worklist.dump(2) << "\n";
    std::cout << breakdown.worklist.size() << " awaiting review, listed in " << (dir / "review_worklist.json")
              << "\n";
    return 0;
}

int ask(const std::string& profile_text, const std::string& query, const fs::path& provider_path,
        const std::vector<std::string>& runner, const fs::path& out) {
    std::ifstream in(provider_path);
    if (!in) throw harness::ConfigError("cannot open provider config " + provider_path.string());
    harness::RunConfig config;
    config.run_id = "ask";
    config.strategy.kind = strategy::StrategyKind::wot;
    config.dataset = "-";
    config.provider = llm::provider_config_from_json(nlohmann::json::parse(in));
    config.profile = sandbox::parse_runner_profile(profile_text);
    config.sandbox.runner_command = runner;
    harness::validate(config);

    TaskInstance instance{"ask", TaskKind::ascii_word, query, "", {}};
    llm::Client client(config.provider);
    sandbox::Sandbox box(1);
    fs::create_directories(out);
    const auto record = harness::run_instance(instance, config, client, box, out);
    std::ifstream transcript(out / record.transcript_ref);
    std::cout << transcript.rdbuf();
    std::cout << "answer: " << record.prediction << "\n";
    if (record.error_category && record.error_category != ErrorCategory::needs_review) {
        std::cerr << "failed: " << to_string(*record.error_category) << ": " << record.error_detail << "\n";
        return harness::kExitPartial;
    }
    return 0;
}

int render_ascii(const fs::path& art_file, const fs::path& png, int margin) {
    const auto bytes = read_binary_file(art_file);
    const std::string art(bytes.begin(), bytes.end());
    write_binary_file(png, encode_png(ascii::rasterize_ascii(art, ascii::embedded_font(), margin)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visual-reasoning evaluation harness"};
    app.require_subcommand(1);

    auto* imp = app.add_subcommand("import-data", "Convert a BIG-bench ASCII task file to JSONL");
    std::string imp_kind;
    std::string imp_src;
    std::string imp_dst;
    std::size_t imp_n = 0;
    std::uint64_t imp_seed = 0;
    imp->add_option("kind", imp_kind, "mnist | word | kanji")->required();
    imp->add_option("src", imp_src, "BIG-bench task.json")->required()->check(CLI::ExistingFile);
    imp->add_option("dst", imp_dst, "output JSONL")->required();
    imp->add_option("--subsample", imp_n, "keep a seeded subset of this size");
    imp->add_option("--seed", imp_seed, "subsample seed");

    auto* gen = app.add_subcommand("gen-nav", "Generate navigation instances");
    std::string gen_kind = "all";
    int gen_n = 100;
    int gen_steps = 4;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    bool gen_relative = false;
    nav::GeneratorOptions gen_options;
    gen->add_option("--kind", gen_kind, "circle | hexagon | triangle | square | rhombus | all")->capture_default_str();
    gen->add_option("--n", gen_n, "instances per kind")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--steps", gen_steps, "steps per program")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "master seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output JSONL")->required();
    gen->add_flag("--relative", gen_relative, "phrase grid steps as turns relative to the facing direction");
    gen->add_option("--grid-side", gen_options.params.grid_side)->capture_default_str();
    gen->add_option("--circle-len", gen_options.params.circle_len)->capture_default_str();
    gen->add_option("--triangle-per-side", gen_options.params.triangle_per_side)->capture_default_str();

    auto* run_cmd = app.add_subcommand("run", "Run an evaluation");
    std::string run_config;
    bool run_resume = false;
    run_cmd->add_option("--config", run_config, "run config JSON")->required()->check(CLI::ExistingFile);
    run_cmd->add_flag("--resume", run_resume, "skip instances already recorded");

    auto* rep = app.add_subcommand("report", "Summarize one or more runs");
    std::vector<std::string> rep_runs;
    std::string rep_root = "runs";
    bool rep_compare = false;
    std::string rep_labels;
    rep->add_option("--run", rep_runs, "run id or run directory")->required();
    rep->add_option("--root", rep_root, "artifact root holding run ids")->capture_default_str();
    rep->add_flag("--compare-paper", rep_compare, "print measured accuracy beside published reference figures");
    rep->add_option("--labels", rep_labels, "human error labels JSON");

    auto* cls = app.add_subcommand("classify-errors", "Categorize incorrect records");
    std::string cls_run;
    std::string cls_root = "runs";
    std::string cls_labels;
    cls->add_option("--run", cls_run, "run id or run directory")->required();
    cls->add_option("--root", cls_root, "artifact root holding run ids")->capture_default_str();
    cls->add_option("--labels", cls_labels, "human error labels JSON")->check(CLI::ExistingFile);

    auto* ask_cmd = app.add_subcommand("ask", "Answer one query by drawing first");
    std::string ask_profile;
    std::string ask_query;
    std::string ask_provider;
    std::vector<std::string> ask_runner;
    std::string ask_out = "ask-out";
    ask_cmd->add_option("--profile", ask_profile, "plotting | turtle_graphics")->required();
    ask_cmd->add_option("query", ask_query)->required();
    ask_cmd->add_option("--provider", ask_provider, "provider config JSON")->required()->check(CLI::ExistingFile);
    ask_cmd->add_option("--runner", ask_runner, "runner command")->required();
    ask_cmd->add_option("--out", ask_out, "directory for transcript and images")->capture_default_str();

    auto* ren = app.add_subcommand("render-ascii", "Rasterize ASCII art with the built-in font");
    std::string ren_in;
    std::string ren_out;
    int ren_margin = 16;
    ren->add_option("art", ren_in)->required()->check(CLI::ExistingFile);
    ren->add_option("png", ren_out)->required();
    ren->add_option("--margin", ren_margin)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*imp) return import_data(imp_kind, imp_src, imp_dst, imp_n, imp_seed);
        if (*gen) {
            gen_options.style = gen_relative ? nav::RenderStyle::relative : nav::RenderStyle::absolute;
            return gen_nav(gen_kind, gen_n, gen_steps, gen_seed, gen_out, gen_options);
        }
        if (*run_cmd) return run(run_config, run_resume);
        if (*rep) return report(rep_runs, rep_root, rep_compare, rep_labels);
        if (*cls) return classify(cls_run, cls_root, cls_labels);
        if (*ask_cmd) return ask(ask_profile, ask_query, ask_provider, ask_runner, ask_out);
        if (*ren) return render_ascii(ren_in, ren_out, ren_margin);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return harness::kExitFatal;
    }
    return harness::kExitFatal;
}
