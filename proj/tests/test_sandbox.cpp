#include "doctest.h"
#include "support.hpp"

#include "wot/common/rng.hpp"
#include "wot/sandbox/execution.hpp"
#include "wot/sandbox/postprocess.hpp"

#include <chrono>
#include <csignal>
#include <future>
#include <set>

using namespace wot;
using namespace wot::sandbox;

namespace {

ExecutionRequest request(const std::string& script, const std::filesystem::path& work, double timeout = 10.0) {
    ExecutionRequest r;
    r.script = script;
    r.work_dir = work;
    r.timeout_seconds = timeout;
    r.runner_command = test::stub_runner();
    return r;
}

bool process_alive(pid_t pid) {
    const auto stat = test::slurp("/proc/" + std::to_string(pid) + "/stat");
    if (stat.empty()) return false;
    const auto close = stat.rfind(')');
    return close != std::string::npos && close + 2 < stat.size() && stat[close + 2] != 'Z';
}

Image noise(int w, int h, int channels, Rng& rng) {
    Image img(w, h, channels);
    for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

/// |minor_out * major - minor * max| <= major / 2, ties rounding up, floor 1.
bool rounds_half_up(long minor_out, long minor, long major, long max) {
    if (minor_out < 1) return false;
    const long twice_err = 2 * (minor_out * major - minor * max);
    if (minor_out == 1 && minor * max * 2 < major) return true;
    return twice_err > -major && twice_err <= major;
}

}  // namespace

TEST_CASE("runner that draws yields ok with its image") {
    Sandbox box;
    const auto work = test::scratch_dir("sandbox_ok") / "w";
    const auto r = box.execute(request("# stub:draw\nplot()", work));
    CHECK(r.status == ExecutionStatus::ok);
    CHECK(r.exit_code == 0);
    REQUIRE(r.images.size() == 1);
    CHECK(r.images[0].path.filename() == "fig_0.png");
    CHECK(r.images[0].width == 160);
    CHECK(r.images[0].height == 120);
    CHECK(r.stdout_text.find("profile=plotting") != std::string::npos);
    CHECK(test::slurp(work / "script.py") == "# stub:draw\nplot()");
}

TEST_CASE("multiple figures come back in numeric order") {
    Sandbox box;
    const auto r = box.execute(request("# stub:draw2", test::scratch_dir("sandbox_two") / "w"));
    REQUIRE(r.images.size() == 2);
    CHECK(r.images[0].path.filename() == "fig_0.png");
    CHECK(r.images[1].path.filename() == "fig_1.png");
}

TEST_CASE("collect_images orders fig_<k> numerically and skips non-PNGs") {
    const auto dir = test::scratch_dir("sandbox_collect");
    for (int k : {10, 2, 1}) write_png_file(dir / ("fig_" + std::to_string(k) + ".png"), Image(4, 4, 3));
    write_png_file(dir / "extra.png", Image(4, 4, 3));
    test::write_text(dir / "fig_3.png", "garbage");
    const auto images = collect_images(dir);
    std::vector<std::string> names;
    for (const auto& i : images) names.push_back(i.path.filename().string());
    CHECK(names == std::vector<std::string>{"fig_1.png", "fig_2.png", "fig_10.png", "extra.png"});
}

TEST_CASE("exit code mapping") {
    Sandbox box;
    const auto dir = test::scratch_dir("sandbox_codes");
    const auto err = box.execute(request("# stub:error", dir / "a"));
    CHECK(err.status == ExecutionStatus::runtime_error);
    CHECK(err.exit_code == 3);
    CHECK(err.stderr_text.find("Traceback") != std::string::npos);
    CHECK(err.images.empty());

    const auto none = box.execute(request("# stub:nodraw", dir / "b"));
    CHECK(none.status == ExecutionStatus::no_image);
    CHECK(none.exit_code == 4);

    const auto junk = box.execute(request("# stub:junk", dir / "c"));
    CHECK(junk.status == ExecutionStatus::no_image);
    CHECK(junk.exit_code == 0);

    auto other = request("", dir / "d");
    other.runner_command = {"sh", "-c", "exit 7", "runner"};
    CHECK(box.execute(other).status == ExecutionStatus::runtime_error);
}

TEST_CASE("timeout kills the runner within the allowance") {
    Sandbox box;
    const auto start = std::chrono::steady_clock::now();
    const auto r = box.execute(request("# stub:sleep", test::scratch_dir("sandbox_timeout") / "w", 1.0));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(r.status == ExecutionStatus::timeout);
    CHECK(r.wall_seconds >= 1.0);
    CHECK(elapsed < 3.0);
    CHECK(r.images.empty());
}

TEST_CASE("timeout reaches grandchildren in the runner's process group") {
    Sandbox box;
    const auto dir = test::scratch_dir("sandbox_tree");
    auto req = request("", dir / "w", 1.0);
    const auto pid_file = dir / "child.pid";
    req.runner_command = {"sh", "-c", "sleep 300 & echo $! > " + pid_file.string() + "; wait", "runner"};
    const auto r = box.execute(req);
    CHECK(r.status == ExecutionStatus::timeout);
    const auto pid_text = test::slurp(pid_file);
    REQUIRE_FALSE(pid_text.empty());
    const pid_t pid = std::stoi(pid_text);
    for (int i = 0; i < 50 && process_alive(pid); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK_FALSE(process_alive(pid));
}

TEST_CASE("runner stdin is empty and cwd is the work directory") {
    Sandbox box;
    const auto work = test::scratch_dir("sandbox_stdin") / "w";
    auto req = request("", work);
    req.runner_command = {"sh", "-c", "if read line; then echo got-input; else echo eof; fi; pwd; touch stray; exit 4",
                          "runner"};
    const auto start = std::chrono::steady_clock::now();
    const auto r = box.execute(req);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
    CHECK(r.status == ExecutionStatus::no_image);
    CHECK(r.stdout_text.find("eof") != std::string::npos);
    CHECK(std::filesystem::exists(work / "stray"));
}

TEST_CASE("work directory must be fresh") {
    Sandbox box;
    const auto work = test::scratch_dir("sandbox_fresh");
    test::write_text(work / "leftover.txt", "x");
    CHECK_THROWS(box.execute(request("# stub:draw", work)));
}

TEST_CASE("missing runner executable is a spawn error") {
    Sandbox box;
    auto req = request("", test::scratch_dir("sandbox_spawn") / "w");
    req.runner_command = {"/nonexistent/runner-binary"};
    CHECK_THROWS_AS(box.execute(req), SpawnError);
}

TEST_CASE("concurrent executions stay isolated") {
    Sandbox box(3);
    const auto dir = test::scratch_dir("sandbox_parallel");
    std::vector<std::future<ExecutionResult>> futures;
    for (int i = 0; i < 8; ++i) {
        futures.push_back(std::async(std::launch::async, [&box, &dir, i] {
            return box.execute(request("# stub:draw\nid = " + std::to_string(i), dir / std::to_string(i)));
        }));
    }
    std::set<std::string> digests;
    for (int i = 0; i < 8; ++i) {
        const auto r = futures[static_cast<std::size_t>(i)].get();
        REQUIRE(r.status == ExecutionStatus::ok);
        CHECK(r.images[0].path.parent_path().parent_path() == dir / std::to_string(i));
        digests.insert(test::slurp(r.images[0].path));
    }
    CHECK(digests.size() == 8);
}

TEST_CASE("border and resize examples") {
    const Image img(100, 80, 3, 7);
    const auto bordered = add_border(img, 32, Rgb::white());
    CHECK(bordered.width() == 164);
    CHECK(bordered.height() == 144);
    CHECK(bordered.rgb(0, 0) == Rgb::white());
    CHECK(add_border(img, 0, Rgb::white()) == img);

    CHECK(fitted_size(1000, 500, 768) == std::pair{768, 384});
    CHECK(fitted_size(300, 300, 768) == std::pair{300, 300});
    CHECK(fitted_size(500, 1000, 768) == std::pair{384, 768});
    const Image small(300, 300, 3, 1);
    CHECK(resize_max(small, 768) == small);
}

TEST_CASE("post-processing property sweep over 200 sizes") {
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        const int w = static_cast<int>(rng.between(1, 1400));
        const int h = static_cast<int>(rng.between(1, 1400));
        const int border = static_cast<int>(rng.between(0, 40));
        const int channels = std::array{1, 3, 4}[rng.below(3)];
        const Rgb color{static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                        static_cast<std::uint8_t>(rng.below(256))};
        const int max_dim = static_cast<int>(rng.between(64, 1024));
        CAPTURE(w);
        CAPTURE(h);
        CAPTURE(border);
        CAPTURE(max_dim);

        const Image img = noise(std::min(w, 300), std::min(h, 300), channels, rng);
        const Image b = add_border(img, border, color);
        REQUIRE(b.width() == img.width() + 2 * border);
        REQUIRE(b.height() == img.height() + 2 * border);
        CHECK(b.channels() == channels);
        Image painted(1, 1, channels);
        painted.set(0, 0, color);
        const std::vector<std::uint8_t> expected(painted.pixel(0, 0), painted.pixel(0, 0) + channels);
        bool border_ok = true;
        for (int y = 0; y < b.height(); ++y) {
            for (int x = 0; x < b.width(); ++x) {
                const bool inside =
                    x >= border && y >= border && x < border + img.width() && y < border + img.height();
                const auto* p = b.pixel(x, y);
                const auto* q = inside ? img.pixel(x - border, y - border) : expected.data();
                if (!std::equal(p, p + channels, q)) border_ok = false;
            }
        }
        CHECK(border_ok);

        const auto [fw, fh] = fitted_size(w, h, max_dim);
        if (std::max(w, h) <= max_dim) {
            CHECK(fw == w);
            CHECK(fh == h);
        } else if (w >= h) {
            CHECK(fw == max_dim);
            CHECK(rounds_half_up(fh, h, w, max_dim));
        } else {
            CHECK(fh == max_dim);
            CHECK(rounds_half_up(fw, w, h, max_dim));
        }

        if (i % 20 == 0) {
            const Image resized = resize_max(img, 64);
            const auto [ew, eh] = fitted_size(img.width(), img.height(), 64);
            CHECK(resized.width() == ew);
            CHECK(resized.height() == eh);
            CHECK(resized.channels() == channels);
            CHECK(resize_max(resized, 64) == resized);
        }
    }
}

TEST_CASE("prepare_for_query composes border then resize") {
    const auto dir = test::scratch_dir("sandbox_prepare");
    ExecutionResult ok;
    ok.status = ExecutionStatus::ok;
    write_png_file(dir / "a.png", Image(600, 600, 3, 50));
    ok.images = {{dir / "a.png", 600, 600}};
    PostProcessConfig cfg;
    auto payload = prepare_for_query(ok, cfg);
    CHECK(payload.mime == "image/png");
    Image out = decode_png(payload.bytes);
    CHECK(out.width() == 664);
    CHECK(out.height() == 664);
    CHECK(out.rgb(0, 0) == Rgb::white());

    write_png_file(dir / "b.png", Image(2000, 1000, 3, 50));
    ok.images = {{dir / "b.png", 2000, 1000}};
    out = decode_png(prepare_for_query(ok, cfg).bytes);
    CHECK(std::max(out.width(), out.height()) == 768);
    CHECK(out.height() == fitted_size(2064, 1064, 768).second);

    ExecutionResult timed_out;
    timed_out.status = ExecutionStatus::timeout;
    CHECK_THROWS_AS(prepare_for_query(timed_out, cfg), PreconditionError);
}

TEST_CASE("post-process config validation") {
    PostProcessConfig cfg;
    cfg.max_dimension_px = 10;
    CHECK_THROWS(validate(cfg));
    cfg = postprocess_config_from_json({{"border_px", 8}, {"max_dimension_px", 512}});
    CHECK(cfg.border_px == 8);
    CHECK(cfg.max_dimension_px == 512);
}
