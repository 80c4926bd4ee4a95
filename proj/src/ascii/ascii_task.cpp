#include "wot/ascii/ascii_task.hpp"

#include "wot/common/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>

namespace wot::ascii {

namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(kWhitespace);
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(kWhitespace) - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_digit_target(std::string_view t) {
    return t.size() == 1 && t[0] >= '0' && t[0] <= '9';
}

struct UpstreamItem {
    const nlohmann::json* example;
    std::string subtask;
};

std::string target_of(const nlohmann::json& ex, std::size_t index) {
    if (ex.contains("target")) {
        const auto& t = ex["target"];
        if (t.is_string()) return t.get<std::string>();
        if (t.is_array() && !t.empty() && t[0].is_string()) return t[0].get<std::string>();
        if (t.is_number_integer()) return std::to_string(t.get<long>());
    }
    if (ex.contains("target_scores") && ex["target_scores"].is_object() && !ex["target_scores"].empty()) {
        // Choices are dropped; the best-scoring option becomes the free-form target.
        std::string best;
        double best_score = 0;
        bool tie = false;
        bool first = true;
        for (const auto& [option, score] : ex["target_scores"].items()) {
            const double s = score.get<double>();
            if (first || s > best_score) {
                best = option;
                best_score = s;
                tie = false;
                first = false;
            } else if (s == best_score) {
                tie = true;
            }
        }
        if (tie) throw MalformedDataset("example " + std::to_string(index) + " has no unique best choice");
        return best;
    }
    throw MalformedDataset("example " + std::to_string(index) + " has no target");
}

FontCategory font_of(const nlohmann::json& ex) {
    for (const char* field : {"font_category", "font"}) {
        if (ex.contains(field) && ex[field].is_string()) return parse_font_category(ex[field].get<std::string>());
    }
    return FontCategory::unknown;
}

}  // namespace

std::string_view to_string(AsciiKind kind) {
    switch (kind) {
        case AsciiKind::mnist: return "mnist";
        case AsciiKind::word: return "word";
        case AsciiKind::kanji: return "kanji";
    }
    return "word";
}

AsciiKind parse_ascii_kind(std::string_view text) {
    if (text == "mnist" || text == "ascii_mnist") return AsciiKind::mnist;
    if (text == "word" || text == "ascii_word") return AsciiKind::word;
    if (text == "kanji" || text == "ascii_kanji") return AsciiKind::kanji;
    throw std::invalid_argument("unknown ascii kind: " + std::string(text));
}

TaskKind task_kind(AsciiKind kind) {
    switch (kind) {
        case AsciiKind::mnist: return TaskKind::ascii_mnist;
        case AsciiKind::word: return TaskKind::ascii_word;
        case AsciiKind::kanji: return TaskKind::ascii_kanji;
    }
    return TaskKind::ascii_word;
}

std::string_view to_string(FontCategory category) {
    switch (category) {
        case FontCategory::three_d: return "3d";
        case FontCategory::basic: return "basic";
        case FontCategory::bubble: return "bubble";
        case FontCategory::doh: return "doh";
        case FontCategory::dot_matrix: return "dot_matrix";
        case FontCategory::unknown: return "unknown";
    }
    return "unknown";
}

FontCategory parse_font_category(std::string_view text) {
    std::string key;
    for (char c : lower(trim(text))) {
        if (std::isalnum(static_cast<unsigned char>(c))) key.push_back(c);
    }
    if (key == "3d" || key == "threed") return FontCategory::three_d;
    if (key == "basic") return FontCategory::basic;
    if (key == "bubble") return FontCategory::bubble;
    if (key == "doh") return FontCategory::doh;
    if (key == "dotmatrix") return FontCategory::dot_matrix;
    return FontCategory::unknown;
}

std::vector<AsciiInstance> import_bigbench(const nlohmann::json& task, AsciiKind kind) {
    if (!task.is_object()) throw MalformedDataset("task file must be a JSON object");

    const std::string root_name = task.value("name", std::string{});
    std::vector<UpstreamItem> items;
    auto collect = [&](const nlohmann::json& examples, const std::string& subtask) {
        if (!examples.is_array()) throw MalformedDataset("\"examples\" must be an array");
        for (const auto& ex : examples) {
            std::string sub = subtask;
            if (ex.is_object() && ex.contains("subtask") && ex["subtask"].is_string()) sub = ex["subtask"].get<std::string>();
            items.push_back({&ex, sub});
        }
    };
    if (task.contains("subtasks")) {
        if (!task["subtasks"].is_array()) throw MalformedDataset("\"subtasks\" must be an array");
        for (const auto& sub : task["subtasks"]) {
            if (!sub.is_object() || !sub.contains("examples")) throw MalformedDataset("subtask without examples");
            collect(sub["examples"], sub.value("name", std::string{}));
        }
    } else if (task.contains("examples")) {
        collect(task["examples"], root_name);
    } else {
        throw MalformedDataset("task file has neither \"examples\" nor \"subtasks\"");
    }

    std::vector<AsciiInstance> out;
    bool dropped_other_subtask = false;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& ex = *items[i].example;
        if (!ex.is_object()) throw MalformedDataset("example " + std::to_string(i) + " is not an object");
        if (kind == AsciiKind::kanji && lower(items[i].subtask).find("pronunciation") == std::string::npos) {
            dropped_other_subtask = true;
            continue;
        }
        if (!ex.contains("input") || !ex["input"].is_string()) {
            throw MalformedDataset("example " + std::to_string(i) + " has no string input");
        }
        AsciiInstance inst;
        inst.id = std::string(to_string(kind)) + "-" + std::to_string(i);
        inst.kind = kind;
        inst.art = ex["input"].get<std::string>();
        inst.target = std::string(trim(target_of(ex, i)));
        inst.font_category = kind == AsciiKind::word ? font_of(ex) : FontCategory::unknown;
        if (trim(inst.art).empty()) throw MalformedDataset("example " + std::to_string(i) + " has empty art");
        if (kind == AsciiKind::mnist && !is_digit_target(inst.target)) {
            throw MalformedDataset("example " + std::to_string(i) + " target is not a digit: " + inst.target);
        }
        if (inst.target.empty()) throw MalformedDataset("example " + std::to_string(i) + " has empty target");
        out.push_back(std::move(inst));
    }
    if (kind == AsciiKind::kanji && out.empty() && dropped_other_subtask) {
        throw UnsupportedSubtask("kanji file has no pronunciation items");
    }
    return out;
}

std::vector<AsciiInstance> import_bigbench(const std::filesystem::path& path, AsciiKind kind) {
    std::ifstream in(path);
    if (!in) throw MalformedDataset("cannot open " + path.string());
    nlohmann::json task;
    try {
        task = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedDataset(path.string() + ": " + e.what());
    }
    return import_bigbench(task, kind);
}

std::vector<AsciiInstance> subsample(const std::vector<AsciiInstance>& instances, std::size_t n, std::uint64_t seed) {
    if (n >= instances.size()) return instances;
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<AsciiInstance> out;
    out.reserve(n);
    for (auto i : order) out.push_back(instances[i]);
    return out;
}

nlohmann::json to_json(const AsciiInstance& inst) {
    nlohmann::json j = {{"id", inst.id}, {"kind", to_string(inst.kind)}, {"art", inst.art}, {"target", inst.target}};
    if (inst.font_category != FontCategory::unknown) j["font_category"] = to_string(inst.font_category);
    return j;
}

AsciiInstance ascii_instance_from_json(const nlohmann::json& j) {
    AsciiInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.kind = parse_ascii_kind(j.at("kind").get<std::string>());
    inst.art = j.at("art").get<std::string>();
    inst.target = j.at("target").get<std::string>();
    if (j.contains("font_category")) inst.font_category = parse_font_category(j["font_category"].get<std::string>());
    if (inst.art.empty()) throw MalformedDataset(inst.id + ": empty art");
    if (inst.kind == AsciiKind::mnist && !is_digit_target(inst.target)) {
        throw MalformedDataset(inst.id + ": mnist target must be a digit");
    }
    if (inst.target.empty()) throw MalformedDataset(inst.id + ": empty target");
    return inst;
}

std::vector<AsciiInstance> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MalformedDataset("cannot open " + path.string());
    std::vector<AsciiInstance> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(ascii_instance_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedDataset(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw MalformedDataset(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<AsciiInstance>& instances) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& inst : instances) out << to_json(inst).dump() << '\n';
}

TaskInstance to_task_instance(const AsciiInstance& inst) {
    TaskInstance t;
    t.id = inst.id;
    t.kind = task_kind(inst.kind);
    t.input = inst.art;
    t.target = inst.target;
    if (inst.kind == AsciiKind::word) t.metadata["font_category"] = std::string(to_string(inst.font_category));
    return t;
}

bool score_mnist(std::string_view prediction, int target_digit) {
    std::string_view s = trim(prediction);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long value = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, 10);
    return ec == std::errc{} && ptr == last && first != last && value == target_digit;
}

bool score_exact_lower(std::string_view prediction, std::string_view target) {
    return lower(trim(prediction)) == lower(target);
}

const std::vector<std::string>& ascii_prompt_suffixes() {
    static const std::vector<std::string> suffixes = {
        "Write Python code with Matplotlib to render the ASCII art as an image.",
        "Let the main figure be called fig with size 6,6.",
        "Ensure each character in the input is considered. Remember colors are matplotlib.colors, and colors must "
        "be RGB to be displayed.",
        "Remember not all rows are necessarily the same length.",
    };
    return suffixes;
}

strategy::TaskProfile matplotlib_profile() {
    strategy::TaskProfile p;
    p.viz_tool_name = "Matplotlib";
    p.user_prompt_suffixes = ascii_prompt_suffixes();
    p.runner_profile = sandbox::RunnerProfile::plotting;
    return p;
}

}  // namespace wot::ascii
