#pragma once

#include "wot/common/rng.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wot::nav {

enum class WorldKind { circle, hexagon, triangle, square, rhombus };

std::string_view to_string(WorldKind kind);
WorldKind parse_world_kind(std::string_view text);
bool is_grid(WorldKind kind);
bool is_cycle(WorldKind kind);
inline constexpr WorldKind kAllWorldKinds[] = {WorldKind::circle, WorldKind::hexagon, WorldKind::triangle,
                                               WorldKind::square, WorldKind::rhombus};

/// World-relative movement tokens. Squares use the four axis tokens,
/// rhombi the four diagonal ones (their grid axes after the 45 degree
/// rotation), cycles clockwise/counterclockwise.
enum class Direction {
    up,
    down,
    left,
    right,
    up_right,
    up_left,
    down_right,
    down_left,
    clockwise,
    counterclockwise,
};

std::string_view to_string(Direction d);
/// Human-readable form used in instructions ("up-right").
std::string_view phrase(Direction d);
Direction parse_direction(std::string_view text);
bool legal_direction(WorldKind kind, Direction d);

struct Vec2 {
    double x = 0;
    double y = 0;
};

struct Node {
    int id = 0;
    Vec2 position;
};

struct Edge {
    int to = 0;
    Direction direction = Direction::up;
    /// Unit vector from this node's position to the neighbor's.
    Vec2 unit;
};

struct WorldParams {
    int grid_side = 3;
    int circle_len = 8;
    /// Triangle perimeter nodes per side; 1 gives a bare three-vertex cycle.
    int triangle_per_side = 3;
};

struct NavWorld {
    WorldKind kind = WorldKind::square;
    WorldParams params;
    std::vector<Node> nodes;
    std::vector<std::vector<Edge>> adjacency;
    std::vector<std::string> labels;
    int start = 0;
    Vec2 start_heading{0, 1};

    std::size_t size() const { return nodes.size(); }
    std::optional<int> neighbor(int node, Direction d) const;
    int node_with_label(std::string_view label) const;
};

class InvalidParams : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The fixed list object labels are drawn from. No entry occurs inside
/// another entry.
const std::vector<std::string>& object_vocabulary();

/// Node counts: grid side^2 (side in 2..8), circle circle_len (>= 3),
/// hexagon 6, triangle 3 * triangle_per_side. Grid ids are row * side + col
/// with row 0 at the bottom; cycle ids run clockwise from the top node.
/// Labels are drawn from `rng` without replacement.
NavWorld build_world(WorldKind kind, const WorldParams& params, Rng& rng);

/// Throws std::logic_error naming the first violated structural invariant.
void check_invariants(const NavWorld& world);

}  // namespace wot::nav
