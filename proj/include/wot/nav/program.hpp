#pragma once

#include "wot/nav/world.hpp"

#include <nlohmann/json.hpp>

#include <variant>
#include <vector>

namespace wot::nav {

enum class Turn { left, right, around };

std::string_view to_string(Turn t);
Turn parse_turn(std::string_view text);

struct Move {
    Direction direction = Direction::up;
    int count = 1;
};

/// Turn relative to the current facing, then walk `count` edges that way.
/// Facing is the direction of the last movement: initially up on grids
/// (rotated with the rhombus) and clockwise on cycles. Cycles only accept
/// `around`.
struct TurnAndMove {
    Turn turn = Turn::left;
    int count = 1;
};

using Step = std::variant<Move, TurnAndMove>;

struct NavProgram {
    std::vector<Step> steps;
};

class IllegalProgram : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void validate(const NavProgram& program, WorldKind kind);
bool uses_only_absolute_moves(const NavProgram& program);

nlohmann::json to_json(const NavProgram& program);
NavProgram program_from_json(const nlohmann::json& j);

}  // namespace wot::nav
