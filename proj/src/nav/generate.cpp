#include "wot/nav/generate.hpp"

#include "wot/nav/simulate.hpp"

#include <algorithm>

namespace wot::nav {

namespace {

constexpr Direction kSquareDirs[] = {Direction::up, Direction::down, Direction::left, Direction::right};
constexpr Direction kRhombusDirs[] = {Direction::up_right, Direction::up_left, Direction::down_right,
                                      Direction::down_left};
constexpr Turn kTurns[] = {Turn::left, Turn::right, Turn::around};

Step sample_step(const NavWorld& world, RenderStyle style, Rng& rng) {
    if (is_grid(world.kind)) {
        const int count = rng.between(1, world.params.grid_side - 1);
        if (style == RenderStyle::relative) {
            return TurnAndMove{kTurns[rng.below(3)], count};
        }
        const auto& dirs = world.kind == WorldKind::square ? kSquareDirs : kRhombusDirs;
        return Move{dirs[rng.below(4)], count};
    }
    const int n = static_cast<int>(world.size());
    return Move{rng.below(2) == 0 ? Direction::clockwise : Direction::counterclockwise, rng.between(1, n)};
}

}  // namespace

NavInstance generate_instance(WorldKind kind, int num_steps, Rng& rng, const GeneratorOptions& options,
                              std::string id) {
    if (num_steps < 1) throw std::invalid_argument("num_steps must be >= 1");
    NavInstance inst;
    inst.kind = kind;
    inst.world = build_world(kind, options.params, rng);
    inst.id = id.empty() ? std::string(to_string(kind)) : std::move(id);

    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        NavProgram program;
        for (int s = 0; s < num_steps; ++s) program.steps.push_back(sample_step(inst.world, options.style, rng));
        Walk path;
        try {
            path = walk(inst.world, program);
        } catch (const OffWorld&) {
            continue;
        }
        std::vector<int> named = {inst.world.start};
        named.insert(named.end(), path.step_ends.begin(), path.step_ends.end() - 1);
        if (std::find(named.begin(), named.end(), path.final_node) == named.end()) continue;

        inst.program = std::move(program);
        inst.target = inst.world.labels[static_cast<std::size_t>(path.final_node)];
        inst.text = render_program(inst.world, inst.program, rng);
        return inst;
    }
    throw GenerationFailed("no answerable " + std::string(to_string(kind)) + " program with " +
                           std::to_string(num_steps) + " steps after " + std::to_string(options.max_attempts) +
                           " attempts");
}

std::vector<NavInstance> generate_batch(WorldKind kind, int n, int num_steps, std::uint64_t master_seed,
                                        const GeneratorOptions& options) {
    std::vector<NavInstance> out;
    out.reserve(static_cast<std::size_t>(std::max(0, n)));
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
        out.push_back(generate_instance(kind, num_steps, rng, options,
                                        std::string(to_string(kind)) + "-s" + std::to_string(master_seed) + "-" +
                                            std::to_string(i)));
    }
    return out;
}

}  // namespace wot::nav
