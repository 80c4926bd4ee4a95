#include "wot/harness/record.hpp"

#include <chrono>
#include <ctime>
#include <sstream>
#include <stdexcept>

namespace wot::harness {

namespace fs = std::filesystem;

nlohmann::json to_json(const RunRecord& r) {
    nlohmann::json j = deterministic_view(r);
    j["timing"] = {
        {"wall_seconds", r.timing.wall_seconds},
        {"started_at", r.timing.started_at},
        {"finished_at", r.timing.finished_at},
    };
    return j;
}

nlohmann::json deterministic_view(const RunRecord& r) {
    nlohmann::json j = {
        {"instance_id", r.instance_id},
        {"strategy", r.strategy},
        {"task", r.task},
        {"target", r.target},
        {"prediction", r.prediction},
        {"correct", r.correct},
        {"error_category", r.error_category ? nlohmann::json(to_string(*r.error_category)) : nlohmann::json()},
        {"error_detail", r.error_detail},
        {"execution_status", r.execution_status ? nlohmann::json(*r.execution_status) : nlohmann::json()},
        {"transcript_digest", r.transcript_digest},
        {"transcript_ref", r.transcript_ref},
        {"artifacts", r.artifacts},
        {"usage",
         {{"prompt_tokens", r.usage.prompt_tokens},
          {"completion_tokens", r.usage.completion_tokens},
          {"calls", r.calls}}},
        {"metadata", r.metadata},
        {"prompt_set_version", r.prompt_set_version},
    };
    return j;
}

RunRecord run_record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.target = j.value("target", "");
    r.prediction = j.value("prediction", "");
    r.correct = j.at("correct").get<bool>();
    if (j.contains("error_category") && !j["error_category"].is_null()) {
        const auto text = j["error_category"].get<std::string>();
        r.error_category = parse_error_category(text);
        if (!r.error_category) throw ParseError("unknown error_category: " + text);
    }
    r.error_detail = j.value("error_detail", "");
    if (j.contains("execution_status") && !j["execution_status"].is_null()) {
        r.execution_status = j["execution_status"].get<std::string>();
    }
    r.transcript_digest = j.value("transcript_digest", "");
    r.transcript_ref = j.value("transcript_ref", "");
    r.artifacts = j.value("artifacts", std::vector<std::string>{});
    if (j.contains("usage")) {
        const auto& u = j["usage"];
        r.usage.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
        r.usage.completion_tokens = u.value("completion_tokens", std::int64_t{0});
        r.calls = u.value("calls", 0L);
    }
    r.metadata = j.value("metadata", std::map<std::string, std::string>{});
    r.prompt_set_version = j.value("prompt_set_version", "");
    if (j.contains("timing")) {
        const auto& t = j["timing"];
        r.timing.wall_seconds = t.value("wall_seconds", 0.0);
        r.timing.started_at = t.value("started_at", "");
        r.timing.finished_at = t.value("finished_at", "");
    }
    return r;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::vector<RunRecord> parse_lines(const std::string& content, const fs::path& file, std::size_t* complete_bytes) {
    std::vector<RunRecord> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos) break;
        ++line_no;
        const std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(run_record_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (complete_bytes) *complete_bytes = pos;
    return out;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<RunRecord> read_records(const fs::path& file) {
    if (!fs::exists(file)) throw std::runtime_error("no records at " + file.string());
    return parse_lines(slurp(file), file, nullptr);
}

RecordStore::RecordStore(fs::path file) : file_(std::move(file)) {
    if (fs::exists(file_)) {
        const std::string content = slurp(file_);
        std::size_t complete = 0;
        records_ = parse_lines(content, file_, &complete);
        if (complete < content.size()) {
            repaired_bytes_ = content.size() - complete;
            fs::resize_file(file_, complete);
        }
        for (const auto& r : records_) ids_.insert(r.instance_id);
    } else {
        fs::create_directories(file_.parent_path());
    }
    out_.open(file_, std::ios::binary | std::ios::app);
    if (!out_) throw std::runtime_error("cannot open " + file_.string() + " for append");
}

void RecordStore::append(const RunRecord& record) {
    if (!ids_.insert(record.instance_id).second) {
        throw std::logic_error("duplicate record for " + record.instance_id);
    }
    const std::string line = to_json(record).dump() + "\n";
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw std::runtime_error("write failed on " + file_.string());
    records_.push_back(record);
}

}  // namespace wot::harness
