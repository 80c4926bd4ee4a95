#include "wot/harness/taxonomy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace wot::harness {

Labels load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels " + path.string());
    const auto j = nlohmann::json::parse(in);
    if (!j.is_object()) throw UnknownLabel(path.string() + ": labels must be a JSON object of id -> label");
    Labels labels;
    for (const auto& [id, value] : j.items()) {
        if (!value.is_string()) throw UnknownLabel("label for " + id + " is not a string");
        labels[id] = value.get<std::string>();
    }
    return labels;
}

namespace {

ErrorCategory parse_label(const std::string& id, const std::string& label) {
    const auto category = parse_error_category(label);
    if (category != ErrorCategory::poor_visualization && category != ErrorCategory::visual_perception) {
        throw UnknownLabel("label '" + label + "' for " + id +
                           " is not one of poor_visualization, visual_perception");
    }
    return *category;
}

std::string query_image(const RunRecord& r) {
    const auto it = std::find_if(r.artifacts.begin(), r.artifacts.end(), [](const std::string& a) {
        return a.size() >= 9 && a.compare(a.size() - 9, 9, "query.png") == 0;
    });
    return it == r.artifacts.end() ? std::string{} : *it;
}

}  // namespace

ErrorBreakdown classify_errors(const std::vector<RunRecord>& records, const Labels& labels) {
    ErrorBreakdown out;
    for (const auto& [id, label] : labels) parse_label(id, label);

    for (const auto& r : records) {
        if (r.correct) continue;
        ++out.incorrect;
        ErrorCategory category = ErrorCategory::needs_review;
        const auto status = r.execution_status.value_or("ok");
        if (r.error_category == ErrorCategory::provider_error ||
            r.error_category == ErrorCategory::content_filtered) {
            category = *r.error_category;
        } else if (r.error_category == ErrorCategory::no_code || r.error_category == ErrorCategory::code_execution ||
                   status != "ok") {
            category = ErrorCategory::code_execution;
        } else if (const auto it = labels.find(r.instance_id); it != labels.end()) {
            category = parse_label(it->first, it->second);
        } else {
            out.worklist.push_back({r.instance_id, query_image(r), r.prediction, r.target});
        }
        ++out.counts[category];
        out.assignments[r.instance_id] = category;
    }
    return out;
}

}  // namespace wot::harness
