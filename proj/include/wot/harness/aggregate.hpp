#pragma once

#include "wot/harness/record.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot::harness {

class EmptyRecords : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AccuracyRow {
    std::string key;
    long n = 0;
    long correct = 0;
    /// Percentage rounded half-up to one decimal.
    double accuracy = 0.0;
    std::string accuracy_text;
};

struct AccuracyTable {
    /// Sorted by key.
    std::vector<AccuracyRow> rows;
    /// Over every record that received a group (all records when ungrouped).
    AccuracyRow overall;
};

/// Returns the group of a record, or nullopt to leave it out.
using GroupKey = std::function<std::optional<std::string>(const RunRecord&)>;

/// `correct / n` as a percentage, rounded half-up to one decimal, in exact
/// integer arithmetic. Throws EmptyRecords for n == 0.
double percent_one_decimal(long correct, long n);
std::string format_percent(double value);

/// Throws EmptyRecords when no record is included.
AccuracyTable aggregate(const std::vector<RunRecord>& records, const GroupKey& group = {});

/// Groups by a metadata field; missing values and "unknown" are left out.
GroupKey by_metadata(std::string field);

}  // namespace wot::harness
