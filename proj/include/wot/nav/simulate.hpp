#pragma once

#include "wot/nav/program.hpp"
#include "wot/nav/world.hpp"

#include <stdexcept>
#include <vector>

namespace wot::nav {

class OffWorld : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedKind : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Walk {
    /// Node after each step, in order.
    std::vector<int> step_ends;
    int final_node = 0;
};

/// Executes the program edge by edge over the world's adjacency. Throws
/// OffWorld when a grid move runs past the boundary and IllegalProgram
/// for tokens the world kind does not have.
Walk walk(const NavWorld& world, const NavProgram& program);

/// Final node of walk().
int simulate(const NavWorld& world, const NavProgram& program);

/// Grid-only cross-check: sums per-step displacements in grid coordinates
/// and indexes row * side + col directly, never touching the adjacency.
int displacement_oracle(const NavWorld& world, const NavProgram& program);

}  // namespace wot::nav
