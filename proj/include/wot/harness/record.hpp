#pragma once

#include "wot/common/task.hpp"
#include "wot/llm/chat.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wot::harness {

struct Timing {
    double wall_seconds = 0.0;
    std::string started_at;
    std::string finished_at;
};

/// One line of records.jsonl.
struct RunRecord {
    std::string instance_id;
    std::string strategy;
    std::string task;
    std::string target;
    std::string prediction;
    bool correct = false;
    std::optional<ErrorCategory> error_category;
    std::string error_detail;
    /// Status of the last sandbox execution, when there was one.
    std::optional<std::string> execution_status;
    /// SHA-256 of the persisted transcript JSON.
    std::string transcript_digest;
    /// Paths relative to the run directory.
    std::string transcript_ref;
    std::vector<std::string> artifacts;
    llm::Usage usage;
    long calls = 0;
    std::map<std::string, std::string> metadata;
    std::string prompt_set_version;
    Timing timing;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

/// The record without its timing group; equal across reruns of a
/// deterministic configuration.
nlohmann::json deterministic_view(const RunRecord& record);

std::string utc_timestamp();

/// Append-only records.jsonl. Opening repairs a torn trailing line left by
/// an interrupted writer; every append is one complete line, flushed.
/// Not thread-safe: the harness funnels all appends through one thread.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path file);

    const std::vector<RunRecord>& records() const { return records_; }
    bool contains(const std::string& instance_id) const { return ids_.count(instance_id) > 0; }
    /// Bytes dropped from a torn trailing line when the store was opened.
    std::size_t repaired_bytes() const { return repaired_bytes_; }

    void append(const RunRecord& record);

private:
    std::filesystem::path file_;
    std::vector<RunRecord> records_;
    std::set<std::string> ids_;
    std::size_t repaired_bytes_ = 0;
    std::ofstream out_;
};

/// Parses a records.jsonl without repairing it; a torn last line is ignored.
std::vector<RunRecord> read_records(const std::filesystem::path& file);

}  // namespace wot::harness
