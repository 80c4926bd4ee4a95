#include "wot/nav/simulate.hpp"

#include <array>

namespace wot::nav {

std::string_view to_string(Turn t) {
    switch (t) {
        case Turn::left: return "left";
        case Turn::right: return "right";
        case Turn::around: return "around";
    }
    return "around";
}

Turn parse_turn(std::string_view text) {
    if (text == "left") return Turn::left;
    if (text == "right") return Turn::right;
    if (text == "around") return Turn::around;
    throw std::invalid_argument("unknown turn: " + std::string(text));
}

void validate(const NavProgram& program, WorldKind kind) {
    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        const auto where = "step " + std::to_string(i) + ": ";
        if (const auto* m = std::get_if<Move>(&program.steps[i])) {
            if (m->count < 1) throw IllegalProgram(where + "count must be >= 1");
            if (!legal_direction(kind, m->direction)) {
                throw IllegalProgram(where + std::string(to_string(m->direction)) + " is not a " +
                                     std::string(to_string(kind)) + " direction");
            }
        } else {
            const auto& t = std::get<TurnAndMove>(program.steps[i]);
            if (t.count < 1) throw IllegalProgram(where + "count must be >= 1");
            if (is_cycle(kind) && t.turn != Turn::around) {
                throw IllegalProgram(where + "cycles only support turning around");
            }
        }
    }
}

bool uses_only_absolute_moves(const NavProgram& program) {
    for (const auto& s : program.steps) {
        if (!std::holds_alternative<Move>(s)) return false;
    }
    return true;
}

nlohmann::json to_json(const NavProgram& program) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : program.steps) {
        if (const auto* m = std::get_if<Move>(&s)) {
            steps.push_back({{"op", "move"}, {"direction", to_string(m->direction)}, {"count", m->count}});
        } else {
            const auto& t = std::get<TurnAndMove>(s);
            steps.push_back({{"op", "turn_and_move"}, {"turn", to_string(t.turn)}, {"count", t.count}});
        }
    }
    return steps;
}

NavProgram program_from_json(const nlohmann::json& j) {
    NavProgram p;
    for (const auto& s : j) {
        const auto op = s.at("op").get<std::string>();
        if (op == "move") {
            p.steps.emplace_back(Move{parse_direction(s.at("direction").get<std::string>()), s.at("count").get<int>()});
        } else if (op == "turn_and_move") {
            p.steps.emplace_back(TurnAndMove{parse_turn(s.at("turn").get<std::string>()), s.at("count").get<int>()});
        } else {
            throw IllegalProgram("unknown step op: " + op);
        }
    }
    return p;
}

namespace {

// Axis tokens in counterclockwise order, so "left" is index + 1.
constexpr std::array<Direction, 4> kSquareAxes = {Direction::up, Direction::left, Direction::down, Direction::right};
constexpr std::array<Direction, 4> kRhombusAxes = {Direction::up_left, Direction::down_left, Direction::down_right,
                                                   Direction::up_right};

Direction initial_facing(WorldKind kind) {
    switch (kind) {
        case WorldKind::square: return Direction::up;
        case WorldKind::rhombus: return Direction::up_left;
        default: return Direction::clockwise;
    }
}

Direction turned(WorldKind kind, Direction facing, Turn turn) {
    if (is_cycle(kind)) {
        if (turn != Turn::around) throw IllegalProgram("cycles only support turning around");
        return facing == Direction::clockwise ? Direction::counterclockwise : Direction::clockwise;
    }
    const auto& axes = kind == WorldKind::square ? kSquareAxes : kRhombusAxes;
    std::size_t i = 0;
    while (axes[i] != facing) ++i;
    const std::size_t shift = turn == Turn::left ? 1 : turn == Turn::around ? 2 : 3;
    return axes[(i + shift) % 4];
}

}  // namespace

Walk walk(const NavWorld& world, const NavProgram& program) {
    validate(program, world.kind);
    Walk w;
    int at = world.start;
    Direction facing = initial_facing(world.kind);
    for (const auto& step : program.steps) {
        Direction dir{};
        int count = 0;
        if (const auto* m = std::get_if<Move>(&step)) {
            dir = m->direction;
            count = m->count;
        } else {
            const auto& t = std::get<TurnAndMove>(step);
            dir = turned(world.kind, facing, t.turn);
            count = t.count;
        }
        for (int k = 0; k < count; ++k) {
            const auto next = world.neighbor(at, dir);
            if (!next) {
                throw OffWorld("moving " + std::string(to_string(dir)) + " from node " + std::to_string(at) +
                               " leaves the world");
            }
            at = *next;
        }
        facing = dir;
        w.step_ends.push_back(at);
    }
    w.final_node = at;
    return w;
}

int simulate(const NavWorld& world, const NavProgram& program) {
    return walk(world, program).final_node;
}

int displacement_oracle(const NavWorld& world, const NavProgram& program) {
    if (!is_grid(world.kind)) {
        throw UnsupportedKind("displacement oracle only covers grid worlds");
    }
    if (!uses_only_absolute_moves(program)) {
        throw IllegalProgram("displacement oracle needs absolute moves only");
    }
    const int side = world.params.grid_side;
    int col = world.start % side;
    int row = world.start / side;
    for (const auto& step : program.steps) {
        const auto& m = std::get<Move>(step);
        int dc = 0;
        int dr = 0;
        switch (m.direction) {
            case Direction::up: case Direction::up_left: dr = 1; break;
            case Direction::down: case Direction::down_right: dr = -1; break;
            case Direction::left: case Direction::down_left: dc = -1; break;
            case Direction::right: case Direction::up_right: dc = 1; break;
            default: throw IllegalProgram("cycle direction on a grid");
        }
        if (!legal_direction(world.kind, m.direction)) throw IllegalProgram("direction illegal for this grid");
        col += dc * m.count;
        row += dr * m.count;
        if (col < 0 || col >= side || row < 0 || row >= side) {
            throw OffWorld("displacement leaves the grid");
        }
    }
    return row * side + col;
}

}  // namespace wot::nav
