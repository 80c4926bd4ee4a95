#pragma once

#include "wot/nav/program.hpp"
#include "wot/nav/render.hpp"
#include "wot/nav/world.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot::nav {

struct NavInstance {
    std::string id;
    WorldKind kind = WorldKind::square;
    std::string text;
    NavProgram program;
    NavWorld world;
    std::string target;
};

struct GeneratorOptions {
    WorldParams params;
    /// relative turns are only drawn on grids; cycles always use cw/ccw.
    RenderStyle style = RenderStyle::absolute;
    int max_attempts = 10'000;
};

class GenerationFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds a world, then rejection-samples programs until one stays on the
/// world and ends on a node the text has already named (the start or the
/// end of an earlier step), so the question is answerable from the text.
/// Target is the final node's label.
NavInstance generate_instance(WorldKind kind, int num_steps, Rng& rng, const GeneratorOptions& options = {},
                              std::string id = {});

/// `n` instances with per-instance seeds derived from `master_seed`.
/// Ids are "<kind>-s<master_seed>-<index>".
std::vector<NavInstance> generate_batch(WorldKind kind, int n, int num_steps, std::uint64_t master_seed,
                                        const GeneratorOptions& options = {});

}  // namespace wot::nav
