#include "wot/harness/report.hpp"

#include <fmt/format.h>

#include <array>

namespace wot::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::array kReference = {
    ReferenceValue{"ascii", "direct", "ascii_mnist", 19.6, 1},
    ReferenceValue{"ascii", "direct", "ascii_word", 24.8, 1},
    ReferenceValue{"ascii", "direct", "ascii_kanji", 1.1, 1},
    ReferenceValue{"ascii", "cot", "ascii_mnist", 21.6, 1},
    ReferenceValue{"ascii", "cot", "ascii_word", 27.2, 1},
    ReferenceValue{"ascii", "cot", "ascii_kanji", 1.1, 1},
    ReferenceValue{"ascii", "wot", "ascii_mnist", 66.0, 1},
    ReferenceValue{"ascii", "wot", "ascii_word", 66.4, 1},
    ReferenceValue{"ascii", "wot", "ascii_kanji", 73.8, 1},

    ReferenceValue{"font", "direct", "3d", 0.0, 1},
    ReferenceValue{"font", "direct", "basic", 0.0, 1},
    ReferenceValue{"font", "direct", "bubble", 100.0, 1},
    ReferenceValue{"font", "direct", "doh", 50.0, 1},
    ReferenceValue{"font", "direct", "dot_matrix", 0.0, 1},
    ReferenceValue{"font", "cot", "3d", 0.0, 1},
    ReferenceValue{"font", "cot", "basic", 0.0, 1},
    ReferenceValue{"font", "cot", "bubble", 100.0, 1},
    ReferenceValue{"font", "cot", "doh", 62.5, 1},
    ReferenceValue{"font", "cot", "dot_matrix", 0.0, 1},
    ReferenceValue{"font", "wot", "3d", 92.1, 1},
    ReferenceValue{"font", "wot", "basic", 78.0, 1},
    ReferenceValue{"font", "wot", "bubble", 42.1, 1},
    ReferenceValue{"font", "wot", "doh", 89.6, 1},
    ReferenceValue{"font", "wot", "dot_matrix", 11.8, 1},

    ReferenceValue{"navigation", "direct", "circle", 14, 0},
    ReferenceValue{"navigation", "direct", "hexagon", 3, 0},
    ReferenceValue{"navigation", "direct", "triangle", 16, 0},
    ReferenceValue{"navigation", "direct", "square", 68, 0},
    ReferenceValue{"navigation", "direct", "rhombus", 63, 0},
    ReferenceValue{"navigation", "direct", "avg", 33, 0},
    ReferenceValue{"navigation", "cot", "circle", 25, 0},
    ReferenceValue{"navigation", "cot", "hexagon", 8, 0},
    ReferenceValue{"navigation", "cot", "triangle", 26, 0},
    ReferenceValue{"navigation", "cot", "square", 98, 0},
    ReferenceValue{"navigation", "cot", "rhombus", 51, 0},
    ReferenceValue{"navigation", "cot", "avg", 42, 0},
    ReferenceValue{"navigation", "wot", "circle", 41, 0},
    ReferenceValue{"navigation", "wot", "hexagon", 61, 0},
    ReferenceValue{"navigation", "wot", "triangle", 55, 0},
    ReferenceValue{"navigation", "wot", "square", 50, 0},
    ReferenceValue{"navigation", "wot", "rhombus", 52, 0},
    ReferenceValue{"navigation", "wot", "avg", 52, 0},

    ReferenceValue{"fixed_render", "fixed_render", "ascii_word", 22.0, 1},
    ReferenceValue{"real_images", "real_images", "ascii_mnist", 80.8, 1},
};

constexpr std::array kStrategies = {"direct", "cot", "wot"};
constexpr std::array kAsciiColumns = {"ascii_mnist", "ascii_word", "ascii_kanji"};
constexpr std::array kFontColumns = {"3d", "basic", "bubble", "doh", "dot_matrix"};
constexpr std::array kNavColumns = {"circle", "hexagon", "triangle", "square", "rhombus", "avg"};

std::string reference_text(std::string_view table, std::string_view strategy, std::string_view column) {
    const auto ref = find_reference(table, strategy, column);
    return ref ? fmt::format("{:.{}f}", ref->value, ref->decimals) : "-";
}

const RunSummary* find_run(const std::vector<RunSummary>& runs, std::string_view strategy, std::string_view task) {
    for (const auto& r : runs) {
        if (r.strategy == strategy && r.task == task) return &r;
    }
    return nullptr;
}

std::string breakdown_text(const RunSummary* run, std::string_view key) {
    if (!run || !run->breakdown) return "-";
    for (const auto& row : run->breakdown->rows) {
        if (row.key == key) return row.accuracy_text;
    }
    return "-";
}

void table_header(std::string& out, std::string_view title, std::span<const char* const> columns) {
    out += fmt::format("\n{}\n{:<14}", title, "");
    for (const char* c : columns) out += fmt::format("{:>22}", c);
    out += fmt::format("\n{:<14}", "");
    for (std::size_t i = 0; i < columns.size(); ++i) out += fmt::format("{:>11}{:>11}", "measured", "reference");
    out += "\n";
}

std::string comparison(const std::vector<RunSummary>& runs) {
    std::string out = "\nMeasured accuracy (%) beside published reference figures\n";

    table_header(out, "ASCII recognition", kAsciiColumns);
    for (const char* s : kStrategies) {
        out += fmt::format("{:<14}", s);
        for (const char* task : kAsciiColumns) {
            const auto* run = find_run(runs, s, task);
            out += fmt::format("{:>11}{:>11}", run ? run->accuracy.overall.accuracy_text : "-",
                               reference_text("ascii", s, task));
        }
        out += "\n";
    }

    table_header(out, "Word recognition by font category", kFontColumns);
    for (const char* s : kStrategies) {
        out += fmt::format("{:<14}", s);
        const auto* run = find_run(runs, s, "ascii_word");
        for (const char* font : kFontColumns) {
            out += fmt::format("{:>11}{:>11}", breakdown_text(run, font), reference_text("font", s, font));
        }
        out += "\n";
    }

    table_header(out, "Spatial navigation", kNavColumns);
    for (const char* s : kStrategies) {
        out += fmt::format("{:<14}", s);
        const auto* run = find_run(runs, s, "navigation");
        for (const char* kind : kNavColumns) {
            const std::string measured = std::string_view(kind) == "avg"
                                             ? (run ? run->accuracy.overall.accuracy_text : "-")
                                             : breakdown_text(run, kind);
            out += fmt::format("{:>11}{:>11}", measured, reference_text("navigation", s, kind));
        }
        out += "\n";
    }

    const auto* fixed = find_run(runs, "fixed_render", "ascii_word");
    out += fmt::format("\nfixed render, word recognition: measured {} reference {}\n",
                       fixed ? fixed->accuracy.overall.accuracy_text : "-",
                       reference_text("fixed_render", "fixed_render", "ascii_word"));
    out += fmt::format("real digit images (not reproduced here): reference {}\n",
                       reference_text("real_images", "real_images", "ascii_mnist"));
    return out;
}

}  // namespace

std::span<const ReferenceValue> reference_values() { return kReference; }

std::optional<ReferenceValue> find_reference(std::string_view table, std::string_view strategy,
                                             std::string_view column) {
    for (const auto& r : kReference) {
        if (r.table == table && r.strategy == strategy && r.column == column) return r;
    }
    return std::nullopt;
}

ReferenceValue reference_value(std::string_view table, std::string_view strategy, std::string_view column) {
    if (auto ref = find_reference(table, strategy, column)) return *ref;
    throw MissingReference(fmt::format("no reference for {}/{}/{}", table, strategy, column));
}

RunSummary summarize(std::string run_id, const std::vector<RunRecord>& records, const Labels& labels) {
    RunSummary s;
    s.run_id = std::move(run_id);
    s.accuracy = aggregate(records);
    s.strategy = records.front().strategy;
    s.task = records.front().task;
    for (const auto& r : records) {
        if (r.strategy != s.strategy) s.strategy = "mixed";
        if (r.task != s.task) s.task = "mixed";
        s.usage += r.usage;
        s.calls += r.calls;
    }
    if (s.task == "ascii_word") s.breakdown_field = "font_category";
    if (s.task == "navigation") s.breakdown_field = "kind";
    if (!s.breakdown_field.empty()) {
        try {
            s.breakdown = aggregate(records, by_metadata(s.breakdown_field));
        } catch (const EmptyRecords&) {
        }
    }
    s.errors = classify_errors(records, labels);
    return s;
}

RunSummary summarize_run(const fs::path& run_dir, const Labels& labels) {
    const auto records = read_records(run_dir / "records.jsonl");
    if (records.empty()) throw EmptyRecords("run " + run_dir.string() + " has no records");
    return summarize(run_dir.filename().string(), records, labels);
}

namespace {

nlohmann::json to_json(const AccuracyRow& row) {
    return {{"key", row.key}, {"n", row.n}, {"correct", row.correct}, {"accuracy", row.accuracy}};
}

}  // namespace

nlohmann::json to_json(const RunSummary& s) {
    nlohmann::json j = {
        {"run_id", s.run_id},
        {"strategy", s.strategy},
        {"task", s.task},
        {"accuracy", to_json(s.accuracy.overall)},
        {"usage", {{"prompt_tokens", s.usage.prompt_tokens},
                   {"completion_tokens", s.usage.completion_tokens},
                   {"calls", s.calls}}},
    };
    if (s.breakdown) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : s.breakdown->rows) rows.push_back(to_json(row));
        j["breakdown"] = {{"field", s.breakdown_field}, {"rows", rows}, {"overall", to_json(s.breakdown->overall)}};
    }
    nlohmann::json errors = nlohmann::json::object();
    for (const auto& [category, n] : s.errors.counts) errors[std::string(to_string(category))] = n;
    j["errors"] = {{"incorrect", s.errors.incorrect}, {"counts", errors}, {"needs_review", s.errors.worklist.size()}};
    return j;
}

std::string render_report(const std::vector<RunSummary>& runs, bool compare_reference) {
    std::string out;
    for (const auto& s : runs) {
        out += fmt::format("run {}  strategy={}  task={}  records={}\n", s.run_id, s.strategy, s.task,
                           s.accuracy.overall.n);
        out += fmt::format("  accuracy {}% ({}/{})\n", s.accuracy.overall.accuracy_text, s.accuracy.overall.correct,
                           s.accuracy.overall.n);
        if (s.breakdown) {
            out += fmt::format("  by {}:\n", s.breakdown_field);
            for (const auto& row : s.breakdown->rows) {
                out += fmt::format("    {:<12} {:>6}% ({}/{})\n", row.key, row.accuracy_text, row.correct, row.n);
            }
        }
        out += fmt::format("  usage prompt_tokens={} completion_tokens={} calls={}\n", s.usage.prompt_tokens,
                           s.usage.completion_tokens, s.calls);
        out += fmt::format("  errors ({} incorrect):", s.errors.incorrect);
        if (s.errors.counts.empty()) out += " none";
        for (const auto& [category, n] : s.errors.counts) out += fmt::format(" {}={}", to_string(category), n);
        out += "\n";
    }
    if (compare_reference) out += comparison(runs);
    return out;
}

}  // namespace wot::harness
