#pragma once

#include "wot/common/rng.hpp"
#include "wot/nav/program.hpp"
#include "wot/nav/world.hpp"

#include <string>

namespace wot::nav {

enum class RenderStyle { absolute, relative };

/// Natural-language instructions for walking `program` through `world`.
///
/// One sentence per step, with template wording drawn from `rng`. The start
/// node's object is named up front and the object at the end of every step
/// except the last is mentioned; the text closes with "What will you
/// find?". Same world, program and rng state give the same text.
std::string render_program(const NavWorld& world, const NavProgram& program, Rng& rng);

}  // namespace wot::nav
