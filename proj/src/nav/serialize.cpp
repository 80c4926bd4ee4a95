#include "wot/nav/serialize.hpp"

#include "wot/nav/simulate.hpp"

#include <cmath>
#include <fstream>

namespace wot::nav {

nlohmann::json to_json(const NavWorld& w) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : w.nodes) {
        nodes.push_back({{"id", n.id},
                         {"x", n.position.x},
                         {"y", n.position.y},
                         {"label", w.labels[static_cast<std::size_t>(n.id)]}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t from = 0; from < w.adjacency.size(); ++from) {
        for (const auto& e : w.adjacency[from]) {
            edges.push_back({{"from", from}, {"to", e.to}, {"direction", to_string(e.direction)}});
        }
    }
    return {{"kind", to_string(w.kind)},
            {"params",
             {{"grid_side", w.params.grid_side},
              {"circle_len", w.params.circle_len},
              {"triangle_per_side", w.params.triangle_per_side}}},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"start", w.start},
            {"start_heading", {w.start_heading.x, w.start_heading.y}}};
}

NavWorld world_from_json(const nlohmann::json& j) {
    NavWorld w;
    w.kind = parse_world_kind(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    w.params.grid_side = p.value("grid_side", w.params.grid_side);
    w.params.circle_len = p.value("circle_len", w.params.circle_len);
    w.params.triangle_per_side = p.value("triangle_per_side", w.params.triangle_per_side);
    for (const auto& n : j.at("nodes")) {
        w.nodes.push_back({n.at("id").get<int>(), {n.at("x").get<double>(), n.at("y").get<double>()}});
        w.labels.push_back(n.at("label").get<std::string>());
    }
    w.adjacency.assign(w.nodes.size(), {});
    for (const auto& e : j.at("edges")) {
        const auto from = e.at("from").get<std::size_t>();
        const int to = e.at("to").get<int>();
        if (from >= w.nodes.size() || to < 0 || static_cast<std::size_t>(to) >= w.nodes.size()) {
            throw std::invalid_argument("edge endpoint outside world");
        }
        const Vec2 a = w.nodes[from].position;
        const Vec2 b = w.nodes[static_cast<std::size_t>(to)].position;
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        w.adjacency[from].push_back(
            {to, parse_direction(e.at("direction").get<std::string>()), {(b.x - a.x) / len, (b.y - a.y) / len}});
    }
    w.start = j.at("start").get<int>();
    const auto heading = j.at("start_heading");
    w.start_heading = {heading.at(0).get<double>(), heading.at(1).get<double>()};
    check_invariants(w);
    return w;
}

nlohmann::json to_json(const NavInstance& inst) {
    return {{"id", inst.id},
            {"kind", to_string(inst.kind)},
            {"text", inst.text},
            {"target", inst.target},
            {"program", to_json(inst.program)},
            {"world", to_json(inst.world)}};
}

NavRecord nav_record_from_json(const nlohmann::json& j, std::size_t line_index) {
    NavRecord r;
    r.id = j.value("id", "nav-" + std::to_string(line_index));
    if (j.contains("kind") && j["kind"].is_string()) r.kind = parse_world_kind(j["kind"].get<std::string>());
    r.text = j.at("text").get<std::string>();
    r.target = j.at("target").get<std::string>();
    if (j.contains("program") && j.contains("world")) {
        r.program = program_from_json(j["program"]);
        r.world = world_from_json(j["world"]);
        if (!r.kind) r.kind = r.world->kind;
    }
    return r;
}

std::vector<NavRecord> read_nav_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<NavRecord> out;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(nav_record_from_json(nlohmann::json::parse(line), index));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ": record " + std::to_string(index) + ": " + e.what());
        }
        ++index;
    }
    return out;
}

void write_nav_jsonl(const std::filesystem::path& path, const std::vector<NavInstance>& instances) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& inst : instances) out << to_json(inst).dump() << '\n';
}

std::optional<bool> verify(const NavRecord& r) {
    if (!r.verifiable()) return std::nullopt;
    const int final_node = simulate(*r.world, *r.program);
    return r.world->labels[static_cast<std::size_t>(final_node)] == r.target;
}

TaskInstance to_task_instance(const NavRecord& r) {
    TaskInstance t;
    t.id = r.id;
    t.kind = TaskKind::navigation;
    t.input = r.text;
    t.target = r.target;
    if (r.kind) t.metadata["kind"] = std::string(to_string(*r.kind));
    return t;
}

const std::vector<std::string>& nav_prompt_suffixes() {
    static const std::vector<std::string> suffixes = {
        "Use Python code with Turtle to visualize each step.",
        "All directions are in reference to up at setheading(90).",
        "Name the turtle t; let the step size be 200; mark the final position with a red dot (do not write the "
        "final position as text). All other steps may be written as text.",
    };
    return suffixes;
}

strategy::TaskProfile turtle_profile() {
    strategy::TaskProfile p;
    p.viz_tool_name = "Turtle";
    p.user_prompt_suffixes = nav_prompt_suffixes();
    p.runner_profile = sandbox::RunnerProfile::turtle_graphics;
    return p;
}

}  // namespace wot::nav
