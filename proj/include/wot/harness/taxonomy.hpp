#pragma once

#include "wot/harness/record.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot::harness {

class UnknownLabel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An incorrect answer awaiting a human label.
struct ReviewItem {
    std::string instance_id;
    /// Image the model saw, relative to the run directory; empty if none.
    std::string image_ref;
    std::string prediction;
    std::string target;
};

struct ErrorBreakdown {
    std::map<ErrorCategory, long> counts;
    std::map<std::string, ErrorCategory> assignments;
    std::vector<ReviewItem> worklist;
    long incorrect = 0;
};

/// Instance id -> label. Only poor_visualization and visual_perception are
/// accepted; anything else throws UnknownLabel.
using Labels = std::map<std::string, std::string>;

/// Reads a JSON object of id -> label.
Labels load_labels(const std::filesystem::path& path);

/// Assigns each incorrect record exactly one category:
///   provider-side failures keep their category;
///   missing code, failed or imageless executions -> code_execution;
///   otherwise a human label, or needs_review (and a worklist entry).
ErrorBreakdown classify_errors(const std::vector<RunRecord>& records, const Labels& labels = {});

}  // namespace wot::harness
