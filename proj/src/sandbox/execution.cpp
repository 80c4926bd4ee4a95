#include "wot/sandbox/execution.hpp"

#include "wot/common/image.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <optional>

namespace wot::sandbox {

namespace fs = std::filesystem;

std::string_view to_string(RunnerProfile profile) {
    return profile == RunnerProfile::plotting ? "plotting" : "turtle_graphics";
}

RunnerProfile parse_runner_profile(std::string_view text) {
    if (text == "plotting") return RunnerProfile::plotting;
    if (text == "turtle_graphics" || text == "turtle") return RunnerProfile::turtle_graphics;
    throw std::invalid_argument("unknown runner profile: " + std::string(text));
}

std::string_view to_string(ExecutionStatus status) {
    switch (status) {
        case ExecutionStatus::ok: return "ok";
        case ExecutionStatus::timeout: return "timeout";
        case ExecutionStatus::runtime_error: return "runtime_error";
        case ExecutionStatus::no_image: return "no_image";
    }
    return "runtime_error";
}

ExecutionStatus parse_execution_status(std::string_view text) {
    if (text == "ok") return ExecutionStatus::ok;
    if (text == "timeout") return ExecutionStatus::timeout;
    if (text == "runtime_error") return ExecutionStatus::runtime_error;
    if (text == "no_image") return ExecutionStatus::no_image;
    throw std::invalid_argument("unknown execution status: " + std::string(text));
}

nlohmann::json to_json(const ExecutionResult& r) {
    nlohmann::json images = nlohmann::json::array();
    for (const auto& a : r.images) {
        images.push_back({{"path", a.path.filename().string()}, {"width", a.width}, {"height", a.height}});
    }
    return {{"status", to_string(r.status)},
            {"exit_code", r.exit_code},
            {"images", std::move(images)},
            {"stdout", r.stdout_text},
            {"stderr", r.stderr_text}};
}

std::vector<RasterArtifact> collect_images(const fs::path& out_dir) {
    struct Candidate {
        std::optional<long> index;
        fs::path path;
    };
    std::vector<Candidate> found;
    std::error_code ec;
    if (!fs::is_directory(out_dir, ec)) return {};
    for (const auto& entry : fs::directory_iterator(out_dir, ec)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
        Candidate c{std::nullopt, entry.path()};
        const std::string stem = entry.path().stem().string();
        if (stem.starts_with("fig_")) {
            long k = 0;
            const char* first = stem.data() + 4;
            const char* last = stem.data() + stem.size();
            auto [ptr, err] = std::from_chars(first, last, k);
            if (err == std::errc{} && ptr == last && first != last) c.index = k;
        }
        found.push_back(std::move(c));
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        if (a.index.has_value() != b.index.has_value()) return a.index.has_value();
        if (a.index && *a.index != *b.index) return *a.index < *b.index;
        return a.path.filename() < b.path.filename();
    });

    std::vector<RasterArtifact> out;
    for (const auto& c : found) {
        try {
            const auto size = png_dimensions(c.path);
            out.push_back({c.path, size.width, size.height});
        } catch (const DecodeError&) {
        }
    }
    return out;
}

namespace {

constexpr std::size_t kMaxCapture = 1 << 20;

class Fd {
public:
    Fd() = default;
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    Fd& operator=(Fd&& other) noexcept {
        if (this != &other) {
            reset();
            fd_ = std::exchange(other.fd_, -1);
        }
        return *this;
    }
    ~Fd() { reset(); }

    int get() const { return fd_; }
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }

private:
    int fd_ = -1;
};

std::pair<Fd, Fd> make_pipe(int flags) {
    int fds[2];
    if (::pipe2(fds, flags) != 0) {
        throw SpawnError(std::string("pipe: ") + std::strerror(errno));
    }
    return {Fd(fds[0]), Fd(fds[1])};
}

void prepare_work_dir(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec) || !fs::is_empty(dir, ec)) {
            throw SpawnError("work_dir must be a fresh directory: " + dir.string());
        }
    } else if (!fs::create_directories(dir, ec) || ec) {
        throw SpawnError("cannot create work_dir " + dir.string() + ": " + ec.message());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Sandbox::Sandbox(int max_procs)
    : slots_(std::make_unique<std::counting_semaphore<>>(std::max(1, max_procs))) {}

ExecutionResult Sandbox::execute(const ExecutionRequest& req) {
    if (!(req.timeout_seconds > 0)) {
        throw std::invalid_argument("timeout_seconds must be positive");
    }
    if (req.runner_command.empty()) {
        throw SpawnError("runner_command is empty");
    }

    prepare_work_dir(req.work_dir);
    const fs::path script_path = fs::absolute(req.work_dir / "script.py");
    const fs::path out_dir = fs::absolute(req.work_dir / "out");
    fs::create_directories(out_dir);
    {
        std::ofstream script(script_path, std::ios::binary);
        script << req.script;
        if (!script) throw SpawnError("cannot write script to " + script_path.string());
    }

    std::vector<std::string> args = req.runner_command;
    args.emplace_back(to_string(req.profile));
    args.push_back(script_path.string());
    args.push_back(out_dir.string());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const std::string cwd = fs::absolute(req.work_dir).string();

    slots_->acquire();
    struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
    } release{slots_.get()};

    auto [out_r, out_w] = make_pipe(O_CLOEXEC);
    auto [err_r, err_w] = make_pipe(O_CLOEXEC);
    auto [exec_r, exec_w] = make_pipe(O_CLOEXEC);

    const auto t0 = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        throw SpawnError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        // Child: only async-signal-safe calls until exec.
        ::setpgid(0, 0);
        const int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        ::dup2(out_w.get(), STDOUT_FILENO);
        ::dup2(err_w.get(), STDERR_FILENO);
        if (::chdir(cwd.c_str()) == 0) {
            ::execvp(argv[0], argv.data());
        }
        const int code = errno;
        [[maybe_unused]] auto n = ::write(exec_w.get(), &code, sizeof code);
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    out_w.reset();
    err_w.reset();
    exec_w.reset();

    int exec_errno = 0;
    if (::read(exec_r.get(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
        int status = 0;
        ::waitpid(pid, &status, 0);
        throw SpawnError("cannot start runner '" + req.runner_command.front() + "': " + std::strerror(exec_errno));
    }

    ExecutionResult result;
    bool timed_out = false;
    std::array<pollfd, 2> fds{{{out_r.get(), POLLIN, 0}, {err_r.get(), POLLIN, 0}}};
    std::array<std::string*, 2> sinks{&result.stdout_text, &result.stderr_text};
    int open_streams = 2;
    std::optional<std::chrono::steady_clock::time_point> drain_deadline;
    std::array<char, 4096> buf{};

    while (open_streams > 0) {
        const double elapsed = seconds_since(t0);
        if (!timed_out && elapsed >= req.timeout_seconds) {
            ::kill(-pid, SIGKILL);
            timed_out = true;
            drain_deadline = std::chrono::steady_clock::now() + std::chrono::seconds(1);
        }
        int wait_ms = 0;
        if (drain_deadline) {
            const auto left = *drain_deadline - std::chrono::steady_clock::now();
            if (left <= std::chrono::steady_clock::duration::zero()) break;
            wait_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(left).count()) + 1;
        } else {
            wait_ms = static_cast<int>((req.timeout_seconds - elapsed) * 1000.0) + 1;
        }
        const int ready = ::poll(fds.data(), fds.size(), wait_ms);
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (std::size_t i = 0; i < fds.size(); ++i) {
            if (fds[i].fd < 0 || (fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
            const ssize_t n = ::read(fds[i].fd, buf.data(), buf.size());
            if (n > 0) {
                if (sinks[i]->size() < kMaxCapture) {
                    sinks[i]->append(buf.data(), static_cast<std::size_t>(n));
                }
            } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
                fds[i].fd = -1;
                --open_streams;
            }
        }
    }

    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    // Stragglers left in the group (backgrounded renderers, viewers).
    ::kill(-pid, SIGKILL);
    result.wall_seconds = seconds_since(t0);

    auto images = collect_images(out_dir);
    if (timed_out) {
        result.status = ExecutionStatus::timeout;
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
        switch (result.exit_code) {
            case kRunnerOk:
                result.status = images.empty() ? ExecutionStatus::no_image : ExecutionStatus::ok;
                break;
            case kRunnerNoImage:
                result.status = ExecutionStatus::no_image;
                break;
            default:
                result.status = ExecutionStatus::runtime_error;
                break;
        }
    } else {
        result.status = ExecutionStatus::runtime_error;
    }
    if (result.status == ExecutionStatus::ok) {
        result.images = std::move(images);
    }
    return result;
}

ExecutionResult execute_script(const ExecutionRequest& request) {
    static Sandbox sandbox;
    return sandbox.execute(request);
}

}  // namespace wot::sandbox
