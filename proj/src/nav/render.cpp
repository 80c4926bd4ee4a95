#include "wot/nav/render.hpp"

#include "wot/nav/simulate.hpp"

#include <array>

namespace wot::nav {

namespace {

std::string with_article(const std::string& noun) {
    const bool vowel = !noun.empty() && std::string_view("aeiou").find(noun.front()) != std::string_view::npos;
    return (vowel ? "an " : "a ") + noun;
}

std::string steps_word(int count) {
    return std::to_string(count) + (count == 1 ? " step" : " steps");
}

std::string describe_world(const NavWorld& w) {
    const std::string n = std::to_string(w.size());
    const std::string side = std::to_string(w.params.grid_side);
    switch (w.kind) {
        case WorldKind::square:
            return "You are on a " + side + " by " + side + " square grid of positions.";
        case WorldKind::rhombus:
            return "You are on a " + side + " by " + side +
                   " grid of positions rotated 45 degrees, so its rows run up-right and its columns run up-left.";
        case WorldKind::circle:
            return "You are on a circular path with " + n + " evenly spaced positions.";
        case WorldKind::hexagon:
            return "You are on a hexagonal path with a position at each of its 6 corners.";
        case WorldKind::triangle:
            return "You are on a triangular path with " + n + " positions evenly spaced along its three sides.";
    }
    return {};
}

std::string move_sentence(const Move& m, Rng& rng) {
    const std::string dir(phrase(m.direction));
    switch (rng.below(3)) {
        case 0: return "Move " + steps_word(m.count) + " " + dir + ".";
        case 1: return "Go " + dir + " " + steps_word(m.count) + ".";
        default: return "Walk " + steps_word(m.count) + " " + dir + ".";
    }
}

std::string turn_sentence(const TurnAndMove& t, Rng& rng) {
    const std::string turn = t.turn == Turn::around ? "Turn around" : "Turn " + std::string(to_string(t.turn));
    switch (rng.below(2)) {
        case 0: return turn + " and move " + steps_word(t.count) + " forward.";
        default: return turn + ", then walk " + steps_word(t.count) + ".";
    }
}

std::string sighting(const std::string& label, Rng& rng) {
    switch (rng.below(3)) {
        case 0: return "You find " + with_article(label) + ".";
        case 1: return "There is " + with_article(label) + " here.";
        default: return "You see " + with_article(label) + ".";
    }
}

}  // namespace

std::string render_program(const NavWorld& world, const NavProgram& program, Rng& rng) {
    const Walk path = walk(world, program);
    std::string text = describe_world(world);
    text += " You start at the position with " + with_article(world.labels[static_cast<std::size_t>(world.start)]) + ".";
    if (!uses_only_absolute_moves(program)) {
        const bool cycle = is_cycle(world.kind);
        text += cycle ? " You are facing clockwise."
                      : std::string(" You are facing ") + (world.kind == WorldKind::rhombus ? "up-left." : "up.");
    }
    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        text += " ";
        if (const auto* m = std::get_if<Move>(&program.steps[i])) {
            text += move_sentence(*m, rng);
        } else {
            text += turn_sentence(std::get<TurnAndMove>(program.steps[i]), rng);
        }
        if (i + 1 < program.steps.size()) {
            text += " " + sighting(world.labels[static_cast<std::size_t>(path.step_ends[i])], rng);
        }
    }
    text += " What will you find?";
    return text;
}

}  // namespace wot::nav
