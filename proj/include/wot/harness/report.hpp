#pragma once

#include "wot/harness/aggregate.hpp"
#include "wot/harness/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wot::harness {

/// A published accuracy figure, kept for side-by-side display only.
struct ReferenceValue {
    std::string_view table;
    std::string_view strategy;
    std::string_view column;
    double value;
    int decimals;
};

/// Tables: "ascii" (columns are task kinds), "font" (font categories),
/// "navigation" (world kinds plus "avg"), "fixed_render" and "real_images".
std::span<const ReferenceValue> reference_values();
std::optional<ReferenceValue> find_reference(std::string_view table, std::string_view strategy,
                                             std::string_view column);

class MissingReference : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Like find_reference, but throws MissingReference. Reports use
/// find_reference and show measured values alone for uncovered cells.
ReferenceValue reference_value(std::string_view table, std::string_view strategy, std::string_view column);

struct RunSummary {
    std::string run_id;
    std::string strategy;
    std::string task;
    AccuracyTable accuracy;
    /// font_category for word recognition, world kind for navigation.
    std::string breakdown_field;
    std::optional<AccuracyTable> breakdown;
    llm::Usage usage;
    long calls = 0;
    ErrorBreakdown errors;
};

/// Throws EmptyRecords when the run has no records.
RunSummary summarize(std::string run_id, const std::vector<RunRecord>& records, const Labels& labels = {});
RunSummary summarize_run(const std::filesystem::path& run_dir, const Labels& labels = {});

nlohmann::json to_json(const RunSummary& summary);

std::string render_report(const std::vector<RunSummary>& runs, bool compare_reference);

}  // namespace wot::harness
