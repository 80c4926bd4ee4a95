#include "wot/nav/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

namespace wot::nav {

std::string_view to_string(WorldKind kind) {
    switch (kind) {
        case WorldKind::circle: return "circle";
        case WorldKind::hexagon: return "hexagon";
        case WorldKind::triangle: return "triangle";
        case WorldKind::square: return "square";
        case WorldKind::rhombus: return "rhombus";
    }
    return "square";
}

WorldKind parse_world_kind(std::string_view text) {
    for (WorldKind k : kAllWorldKinds) {
        if (to_string(k) == text) return k;
    }
    if (text == "ring") return WorldKind::circle;
    throw std::invalid_argument("unknown world kind: " + std::string(text));
}

bool is_grid(WorldKind kind) { return kind == WorldKind::square || kind == WorldKind::rhombus; }
bool is_cycle(WorldKind kind) { return !is_grid(kind); }

namespace {

struct DirectionName {
    Direction d;
    std::string_view token;
    std::string_view words;
};

constexpr DirectionName kDirections[] = {
    {Direction::up, "up", "up"},
    {Direction::down, "down", "down"},
    {Direction::left, "left", "left"},
    {Direction::right, "right", "right"},
    {Direction::up_right, "up_right", "up-right"},
    {Direction::up_left, "up_left", "up-left"},
    {Direction::down_right, "down_right", "down-right"},
    {Direction::down_left, "down_left", "down-left"},
    {Direction::clockwise, "clockwise", "clockwise"},
    {Direction::counterclockwise, "counterclockwise", "counterclockwise"},
};

Vec2 rotate45(Vec2 v) {
    const double c = std::numbers::sqrt2 / 2.0;
    return {c * (v.x - v.y), c * (v.x + v.y)};
}

Vec2 unit_between(Vec2 from, Vec2 to) {
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double len = std::hypot(dx, dy);
    return {dx / len, dy / len};
}

/// Square-frame axis token -> the rhombus token it becomes after rotation.
Direction rotated(Direction d) {
    switch (d) {
        case Direction::right: return Direction::up_right;
        case Direction::up: return Direction::up_left;
        case Direction::left: return Direction::down_left;
        case Direction::down: return Direction::down_right;
        default: return d;
    }
}

void build_grid(NavWorld& w) {
    const int side = w.params.grid_side;
    const double center = (side - 1) / 2.0;
    const bool rhombus = w.kind == WorldKind::rhombus;
    w.nodes.resize(static_cast<std::size_t>(side * side));
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            const int id = row * side + col;
            Vec2 p{col - center, row - center};
            w.nodes[static_cast<std::size_t>(id)] = {id, rhombus ? rotate45(p) : p};
        }
    }
    w.adjacency.assign(w.nodes.size(), {});
    struct Step {
        int dc, dr;
        Direction d;
    };
    constexpr Step kSteps[] = {{0, 1, Direction::up}, {0, -1, Direction::down}, {-1, 0, Direction::left},
                               {1, 0, Direction::right}};
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            const int id = row * side + col;
            for (const auto& s : kSteps) {
                const int c2 = col + s.dc;
                const int r2 = row + s.dr;
                if (c2 < 0 || c2 >= side || r2 < 0 || r2 >= side) continue;
                const int to = r2 * side + c2;
                w.adjacency[static_cast<std::size_t>(id)].push_back(
                    {to, rhombus ? rotated(s.d) : s.d,
                     unit_between(w.nodes[static_cast<std::size_t>(id)].position,
                                  w.nodes[static_cast<std::size_t>(to)].position)});
            }
        }
    }
    const int mid = (side - 1) / 2;
    w.start = mid * side + mid;
    w.start_heading = rhombus ? rotate45({0, 1}) : Vec2{0, 1};
}

void build_cycle(NavWorld& w, int n) {
    w.nodes.resize(static_cast<std::size_t>(n));
    const double pi = std::numbers::pi;
    if (w.kind == WorldKind::triangle) {
        const int k = w.params.triangle_per_side;
        Vec2 corners[3];
        for (int s = 0; s < 3; ++s) {
            const double a = pi / 2 - 2 * pi * s / 3;
            corners[s] = {std::cos(a), std::sin(a)};
        }
        for (int s = 0; s < 3; ++s) {
            const Vec2 a = corners[s];
            const Vec2 b = corners[(s + 1) % 3];
            for (int j = 0; j < k; ++j) {
                const double t = static_cast<double>(j) / k;
                const int id = s * k + j;
                w.nodes[static_cast<std::size_t>(id)] = {id, {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}};
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double a = pi / 2 - 2 * pi * i / n;
            w.nodes[static_cast<std::size_t>(i)] = {i, {std::cos(a), std::sin(a)}};
        }
    }
    w.adjacency.assign(w.nodes.size(), {});
    for (int i = 0; i < n; ++i) {
        const int next = (i + 1) % n;
        const int prev = (i + n - 1) % n;
        const Vec2 here = w.nodes[static_cast<std::size_t>(i)].position;
        w.adjacency[static_cast<std::size_t>(i)].push_back(
            {next, Direction::clockwise, unit_between(here, w.nodes[static_cast<std::size_t>(next)].position)});
        w.adjacency[static_cast<std::size_t>(i)].push_back(
            {prev, Direction::counterclockwise, unit_between(here, w.nodes[static_cast<std::size_t>(prev)].position)});
    }
    w.start = 0;
    w.start_heading = {0, 1};
}

}  // namespace

std::string_view to_string(Direction d) {
    for (const auto& n : kDirections) {
        if (n.d == d) return n.token;
    }
    return "up";
}

std::string_view phrase(Direction d) {
    for (const auto& n : kDirections) {
        if (n.d == d) return n.words;
    }
    return "up";
}

Direction parse_direction(std::string_view text) {
    for (const auto& n : kDirections) {
        if (n.token == text || n.words == text) return n.d;
    }
    throw std::invalid_argument("unknown direction: " + std::string(text));
}

bool legal_direction(WorldKind kind, Direction d) {
    switch (kind) {
        case WorldKind::square:
            return d == Direction::up || d == Direction::down || d == Direction::left || d == Direction::right;
        case WorldKind::rhombus:
            return d == Direction::up_right || d == Direction::up_left || d == Direction::down_right ||
                   d == Direction::down_left;
        default:
            return d == Direction::clockwise || d == Direction::counterclockwise;
    }
}

std::optional<int> NavWorld::neighbor(int node, Direction d) const {
    for (const auto& e : adjacency.at(static_cast<std::size_t>(node))) {
        if (e.direction == d) return e.to;
    }
    return std::nullopt;
}

int NavWorld::node_with_label(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    return -1;
}

const std::vector<std::string>& object_vocabulary() {
    static const std::vector<std::string> words = {
        "apple",   "anchor",   "basket",   "bell",    "bicycle",  "blanket",    "book",     "bottle",
        "bucket",  "button",   "camera",   "candle",  "carpet",   "chair",      "clock",    "compass",
        "cup",     "desk",     "drum",     "feather", "flag",     "flute",      "fork",     "glove",
        "guitar",  "hammer",   "helmet",   "jar",     "kettle",   "key",        "ladder",   "lamp",
        "lantern", "mirror",   "mug",      "necklace", "paintbrush", "pencil",  "piano",    "pillow",
        "plate",   "radio",    "ribbon",   "rope",    "saddle",   "scarf",      "scissors", "shoe",
        "shovel",  "spoon",    "stapler",  "suitcase", "sweater", "teapot",     "telescope", "towel",
        "trumpet", "umbrella", "vase",     "violin",  "wallet",   "whistle",    "wrench",   "zipper",
    };
    return words;
}

NavWorld build_world(WorldKind kind, const WorldParams& params, Rng& rng) {
    NavWorld w;
    w.kind = kind;
    w.params = params;
    const auto vocab_size = static_cast<int>(object_vocabulary().size());
    switch (kind) {
        case WorldKind::square:
        case WorldKind::rhombus:
            if (params.grid_side < 2 || params.grid_side * params.grid_side > vocab_size) {
                throw InvalidParams("grid_side must be in 2..8");
            }
            build_grid(w);
            break;
        case WorldKind::circle:
            if (params.circle_len < 3 || params.circle_len > vocab_size) {
                throw InvalidParams("circle_len must be in 3..64");
            }
            build_cycle(w, params.circle_len);
            break;
        case WorldKind::hexagon:
            build_cycle(w, 6);
            break;
        case WorldKind::triangle:
            if (params.triangle_per_side < 1 || 3 * params.triangle_per_side > vocab_size) {
                throw InvalidParams("triangle_per_side must be in 1..21");
            }
            build_cycle(w, 3 * params.triangle_per_side);
            break;
    }
    std::vector<std::string> pool = object_vocabulary();
    rng.shuffle(pool);
    pool.resize(w.nodes.size());
    w.labels = std::move(pool);
    return w;
}

void check_invariants(const NavWorld& w) {
    const std::size_t n = w.nodes.size();
    if (n == 0) throw std::logic_error("world has no nodes");
    if (w.adjacency.size() != n || w.labels.size() != n) throw std::logic_error("adjacency/labels size mismatch");
    if (w.start < 0 || static_cast<std::size_t>(w.start) >= n) throw std::logic_error("start outside world");
    for (std::size_t i = 0; i < n; ++i) {
        if (w.nodes[i].id != static_cast<int>(i)) throw std::logic_error("node ids must be dense and ordered");
    }
    std::set<std::string> distinct(w.labels.begin(), w.labels.end());
    if (distinct.size() != n || distinct.count("")) throw std::logic_error("labels must be distinct and nonempty");

    for (std::size_t i = 0; i < n; ++i) {
        std::set<Direction> seen;
        for (const auto& e : w.adjacency[i]) {
            if (e.to < 0 || static_cast<std::size_t>(e.to) >= n) throw std::logic_error("edge leaves the world");
            if (!legal_direction(w.kind, e.direction)) throw std::logic_error("edge direction illegal for kind");
            if (!seen.insert(e.direction).second) throw std::logic_error("duplicate edge direction at a node");
            const auto& back = w.adjacency[static_cast<std::size_t>(e.to)];
            const bool symmetric = std::any_of(back.begin(), back.end(), [&](const Edge& b) {
                return b.to == static_cast<int>(i);
            });
            if (!symmetric) throw std::logic_error("adjacency is not symmetric");
        }
    }

    std::vector<bool> reached(n, false);
    std::queue<int> frontier;
    frontier.push(w.start);
    reached[static_cast<std::size_t>(w.start)] = true;
    std::size_t count = 1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (const auto& e : w.adjacency[static_cast<std::size_t>(u)]) {
            if (!reached[static_cast<std::size_t>(e.to)]) {
                reached[static_cast<std::size_t>(e.to)] = true;
                ++count;
                frontier.push(e.to);
            }
        }
    }
    if (count != n) throw std::logic_error("world is not connected");

    if (is_cycle(w.kind)) {
        for (std::size_t i = 0; i < n; ++i) {
            if (w.adjacency[i].size() != 2) throw std::logic_error("cycle node must have degree 2");
            const auto cw = w.neighbor(static_cast<int>(i), Direction::clockwise);
            const auto ccw = w.neighbor(static_cast<int>(i), Direction::counterclockwise);
            if (!cw || !ccw || *cw == *ccw) throw std::logic_error("cycle node needs distinct cw and ccw neighbors");
            if (w.neighbor(*cw, Direction::counterclockwise) != static_cast<int>(i)) {
                throw std::logic_error("clockwise and counterclockwise are not inverse");
            }
        }
        // Simple cycle: walking clockwise visits every node before returning.
        int at = w.start;
        for (std::size_t step = 1; step < n; ++step) {
            at = *w.neighbor(at, Direction::clockwise);
            if (at == w.start) throw std::logic_error("cycle is not simple");
        }
        if (*w.neighbor(at, Direction::clockwise) != w.start) throw std::logic_error("cycle does not close");
        return;
    }

    const int side = w.params.grid_side;
    if (static_cast<std::size_t>(side * side) != n) throw std::logic_error("grid node count != side^2");
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            const bool boundary_row = row == 0 || row == side - 1;
            const bool boundary_col = col == 0 || col == side - 1;
            const std::size_t expected = 4 - (boundary_row ? 1 : 0) - (boundary_col ? 1 : 0);
            if (w.adjacency[static_cast<std::size_t>(row * side + col)].size() != expected) {
                throw std::logic_error("grid degree mismatch");
            }
        }
    }
    if (w.kind == WorldKind::rhombus) {
        const double center = (side - 1) / 2.0;
        for (int row = 0; row < side; ++row) {
            for (int col = 0; col < side; ++col) {
                const Vec2 expect = rotate45({col - center, row - center});
                const Vec2 got = w.nodes[static_cast<std::size_t>(row * side + col)].position;
                if (std::abs(expect.x - got.x) > 1e-9 || std::abs(expect.y - got.y) > 1e-9) {
                    throw std::logic_error("rhombus positions are not the rotated square");
                }
            }
        }
    }
}

}  // namespace wot::nav
