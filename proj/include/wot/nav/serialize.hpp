#pragma once

#include "wot/common/task.hpp"
#include "wot/nav/generate.hpp"
#include "wot/strategy/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wot::nav {

nlohmann::json to_json(const NavWorld& world);
/// Rebuilds adjacency from the stored edges and checks structural invariants.
NavWorld world_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NavInstance& instance);

/// A corpus line. Generated corpora carry the structured program and world;
/// external benchmark lines only have {text, target} (id and kind optional).
struct NavRecord {
    std::string id;
    std::optional<WorldKind> kind;
    std::string text;
    std::string target;
    std::optional<NavProgram> program;
    std::optional<NavWorld> world;

    bool verifiable() const { return program.has_value() && world.has_value(); }
};

NavRecord nav_record_from_json(const nlohmann::json& j, std::size_t line_index = 0);
std::vector<NavRecord> read_nav_jsonl(const std::filesystem::path& path);
void write_nav_jsonl(const std::filesystem::path& path, const std::vector<NavInstance>& instances);

/// Re-runs the oracle on a record's structured fields. Absent for external
/// records without them.
std::optional<bool> verify(const NavRecord& record);

/// metadata["kind"] carries the geometry when known.
TaskInstance to_task_instance(const NavRecord& record);

/// Sentences appended to the instructions in the code-writing turn.
const std::vector<std::string>& nav_prompt_suffixes();

/// Turtle profile for navigation.
strategy::TaskProfile turtle_profile();

}  // namespace wot::nav
