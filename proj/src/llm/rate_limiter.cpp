#include "wot/llm/client.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace wot::llm {

namespace {

constexpr double kWindowSeconds = 60.0;

double steady_now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void real_sleep(double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

RateLimiter::RateLimiter(int requests_per_minute, long tokens_per_minute, Clock clock, Sleeper sleeper)
    : rpm_(requests_per_minute),
      tpm_(tokens_per_minute),
      clock_(clock ? std::move(clock) : Clock(steady_now)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper(real_sleep)) {}

void RateLimiter::prune(double now) {
    auto expired = [now](const Entry& e) { return now - e.at >= kWindowSeconds; };
    std::erase_if(requests_, expired);
    std::erase_if(tokens_, expired);
}

void RateLimiter::acquire() {
    if (rpm_ <= 0 && tpm_ <= 0) return;
    for (;;) {
        double wait = 0.0;
        {
            std::lock_guard lock(mutex_);
            const double now = clock_();
            prune(now);
            long used = 0;
            for (const auto& e : tokens_) used += e.tokens;
            const bool requests_ok = rpm_ <= 0 || static_cast<int>(requests_.size()) < rpm_;
            const bool tokens_ok = tpm_ <= 0 || used < tpm_;
            if (requests_ok && tokens_ok) {
                requests_.push_back({now, 0});
                return;
            }
            double oldest = now;
            if (!requests_ok && !requests_.empty()) oldest = std::min(oldest, requests_.front().at);
            if (!tokens_ok && !tokens_.empty()) oldest = std::min(oldest, tokens_.front().at);
            wait = std::max(0.01, oldest + kWindowSeconds - now);
        }
        sleeper_(wait);
    }
}

void RateLimiter::record_tokens(long tokens) {
    if (tpm_ <= 0) return;
    std::lock_guard lock(mutex_);
    tokens_.push_back({clock_(), tokens});
}

}  // namespace wot::llm
