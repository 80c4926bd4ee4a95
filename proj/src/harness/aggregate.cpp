#include "wot/harness/aggregate.hpp"

#include <cstdio>
#include <map>

namespace wot::harness {

double percent_one_decimal(long correct, long n) {
    if (n <= 0) throw EmptyRecords("accuracy over zero records");
    const long long tenths = (2000LL * correct + n) / (2LL * n);
    return static_cast<double>(tenths) / 10.0;
}

std::string format_percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", value);
    return buf;
}

namespace {

AccuracyRow make_row(std::string key, long n, long correct) {
    AccuracyRow row{std::move(key), n, correct, percent_one_decimal(correct, n), {}};
    row.accuracy_text = format_percent(row.accuracy);
    return row;
}

}  // namespace

AccuracyTable aggregate(const std::vector<RunRecord>& records, const GroupKey& group) {
    std::map<std::string, std::pair<long, long>> counts;
    long n = 0;
    long correct = 0;
    for (const auto& r : records) {
        std::optional<std::string> key;
        if (group) {
            key = group(r);
            if (!key) continue;
            auto& [gn, gc] = counts[*key];
            ++gn;
            gc += r.correct ? 1 : 0;
        }
        ++n;
        correct += r.correct ? 1 : 0;
    }
    if (n == 0) throw EmptyRecords("no records to aggregate");
    AccuracyTable table;
    for (const auto& [key, c] : counts) table.rows.push_back(make_row(key, c.first, c.second));
    table.overall = make_row("overall", n, correct);
    return table;
}

GroupKey by_metadata(std::string field) {
    return [field = std::move(field)](const RunRecord& r) -> std::optional<std::string> {
        const auto it = r.metadata.find(field);
        if (it == r.metadata.end() || it->second.empty() || it->second == "unknown") return std::nullopt;
        return it->second;
    };
}

}  // namespace wot::harness
