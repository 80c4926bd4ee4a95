#include "doctest.h"
#include "support.hpp"

#include "wot/common/digest.hpp"
#include "wot/llm/client.hpp"
#include "wot/llm/providers.hpp"

#include "httplib.h"

#include <cstdlib>
#include <deque>
#include <thread>

using namespace wot;
using namespace wot::llm;

namespace {

MockProvider::Entry text_entry(std::string text) {
    MockProvider::Entry e;
    e.text = std::move(text);
    return e;
}

std::vector<ChatMessage> text_prompt(const std::string& q) {
    return {ChatMessage::text(Role::system, "sys"), ChatMessage::text(Role::user, q)};
}

ChatMessage image_message() {
    return ChatMessage{Role::user, {TextPart{"look"}, ImagePart{{0x89, 'P', 'N', 'G'}, "image/png"}}};
}

ProviderConfig mock_config() {
    ProviderConfig c;
    c.kind = ProviderKind::mock;
    c.fixture_path = "unused";
    c.retry = {3, 1.0};
    return c;
}

/// Replays a scripted sequence of outcomes, then succeeds.
class ScriptedProvider : public Provider {
public:
    using Outcome = std::function<CompletionResponse()>;
    explicit ScriptedProvider(std::deque<Outcome> script) : script_(std::move(script)) {}

    CompletionResponse send(const ChatRequest&) override {
        ++calls;
        if (script_.empty()) return {"Answer: ok", FinishReason::stop, {10, 3}, 1};
        auto next = std::move(script_.front());
        script_.pop_front();
        return next();
    }

    int calls = 0;

private:
    std::deque<Outcome> script_;
};

ScriptedProvider::Outcome transient(TransientError::Kind kind, std::optional<double> retry_after = std::nullopt) {
    return [=]() -> CompletionResponse { throw TransientError(kind, "scripted", retry_after); };
}

}  // namespace

TEST_CASE("decoding defaults per stage") {
    const auto initial = default_params(ParamStage::initial);
    CHECK(initial.temperature == 0.0);
    CHECK(initial.max_tokens == 2048);
    CHECK(initial.frequency_penalty == doctest::Approx(0.05));
    const auto followup = default_params(ParamStage::image_followup);
    CHECK(followup.temperature == 0.0);
    CHECK(followup.max_tokens == 256);
    CHECK(followup.frequency_penalty == 0.0);
}

TEST_CASE("message validation") {
    CHECK_NOTHROW(validate(image_message()));
    CHECK_THROWS_AS(validate(ChatMessage{Role::user, {}}), InvalidMessage);
    CHECK_THROWS_AS(validate(ChatMessage{Role::assistant, {ImagePart{{1}, "image/png"}}}), InvalidMessage);
    CHECK_THROWS_AS(validate(ChatMessage{Role::user, {ImagePart{{1}, "image/gif"}}}), InvalidMessage);
    GenerationParams bad;
    bad.max_tokens = 0;
    CHECK_THROWS(validate(bad));
}

TEST_CASE("prompt digest is stable and sensitive to content") {
    const auto a = prompt_digest(text_prompt("q"));
    CHECK(a == prompt_digest(text_prompt("q")));
    CHECK(a != prompt_digest(text_prompt("r")));
    auto with_image = text_prompt("q");
    with_image.push_back(image_message());
    const auto j = to_transcript_json(with_image.back());
    CHECK(j.dump().find("sha256") != std::string::npos);
}

TEST_CASE("mock provider answers by (instance, turn) tag") {
    const auto dir = test::scratch_dir("llm_mock");
    const auto fixture = dir / "fixture.jsonl";
    test::write_text(fixture, mock_fixture_line("q1", 0, text_entry("Answer: 7")).dump() + "\n" +
                                  R"({"instance_id":"q1","turn":1,"text":"It is 7","image":true,"prompt_tokens":11,"completion_tokens":2})" +
                                  "\n");
    MockProvider mock(fixture);
    CHECK(mock.size() == 2);

    const ChatRequest req{text_prompt("what digit?"), default_params(ParamStage::initial), {"q1", 0}};
    const auto r1 = mock.send(req);
    const auto r2 = mock.send(req);
    CHECK(r1.text == "Answer: 7");
    CHECK(r1.text == r2.text);
    CHECK(r1.usage == r2.usage);
    CHECK(r1.usage.completion_tokens == 3);  // ceil(9 / 4)

    ChatRequest image_req{{image_message()}, default_params(ParamStage::image_followup), {"q1", 0}};
    CHECK_THROWS_AS(mock.send(image_req), MockMiss);
    image_req.tag.turn = 1;
    const auto r3 = mock.send(image_req);
    CHECK(r3.text == "It is 7");
    CHECK(r3.usage == Usage{11, 2});

    CHECK_THROWS_AS(mock.send({text_prompt("x"), {}, {"q2", 0}}), MockMiss);
}

TEST_CASE("strict mock mode checks the prompt digest") {
    const auto prompt = text_prompt("q");
    MockProvider::Entry entry;
    entry.text = "Answer: 1";
    entry.prompt_digest = prompt_digest(prompt);
    MockProvider strict({{{"a", 0}, entry}}, true);
    CHECK(strict.send({prompt, {}, {"a", 0}}).text == "Answer: 1");
    CHECK_THROWS_AS(strict.send({text_prompt("changed"), {}, {"a", 0}}), MockMiss);
    MockProvider lax({{{"a", 0}, entry}}, false);
    CHECK(lax.send({text_prompt("changed"), {}, {"a", 0}}).text == "Answer: 1");
}

TEST_CASE("length finish reports max_tokens completion tokens") {
    MockProvider::Entry entry;
    entry.text = "cut";
    entry.finish_reason = FinishReason::length;
    MockProvider mock({{{"a", 0}, entry}});
    GenerationParams p;
    p.max_tokens = 256;
    CHECK(mock.send({text_prompt("q"), p, {"a", 0}}).usage.completion_tokens == 256);
}

TEST_CASE("client retries a rate limit once and records two attempts") {
    auto provider = std::make_unique<ScriptedProvider>(
        std::deque<ScriptedProvider::Outcome>{transient(TransientError::Kind::rate_limit)});
    auto* raw = provider.get();
    std::vector<double> slept;
    Client client(mock_config(), std::move(provider), [&](double s) { slept.push_back(s); });
    const auto r = client.complete({text_prompt("q"), {}, {"q1", 0}});
    CHECK(r.text == "Answer: ok");
    CHECK(r.attempts == 2);
    CHECK(raw->calls == 2);
    CHECK(client.totals().attempts == 2);
    CHECK(client.totals().calls == 1);
    CHECK(slept == std::vector<double>{1.0});
}

TEST_CASE("retry budget is bounded and backoff never shrinks") {
    using K = TransientError::Kind;
    SUBCASE("rate limits exhaust into RateLimited") {
        auto provider = std::make_unique<ScriptedProvider>(std::deque<ScriptedProvider::Outcome>{
            transient(K::rate_limit), transient(K::rate_limit), transient(K::rate_limit), transient(K::rate_limit)});
        auto* raw = provider.get();
        Client client(mock_config(), std::move(provider), [](double) {});
        CHECK_THROWS_AS(client.complete({text_prompt("q"), {}, {}}), RateLimited);
        CHECK(raw->calls == 3);
        const auto log = client.backoff_log();
        REQUIRE(log.size() == 2);
        CHECK(log[0] == 1.0);
        CHECK(log[1] == 2.0);
    }
    SUBCASE("server errors exhaust into TransportError") {
        auto provider = std::make_unique<ScriptedProvider>(std::deque<ScriptedProvider::Outcome>{
            transient(K::server), transient(K::network), transient(K::server)});
        Client client(mock_config(), std::move(provider), [](double) {});
        CHECK_THROWS_AS(client.complete({text_prompt("q"), {}, {}}), TransportError);
    }
    SUBCASE("retry-after raises a delay and later delays stay at least as long") {
        ProviderConfig c = mock_config();
        c.retry.max_attempts = 5;
        auto provider = std::make_unique<ScriptedProvider>(std::deque<ScriptedProvider::Outcome>{
            transient(K::rate_limit, 10.0), transient(K::rate_limit), transient(K::server)});
        Client client(c, std::move(provider), [](double) {});
        CHECK(client.complete({text_prompt("q"), {}, {}}).attempts == 4);
        const auto log = client.backoff_log();
        REQUIRE(log.size() == 3);
        CHECK(log[0] == 10.0);
        for (std::size_t i = 1; i < log.size(); ++i) CHECK(log[i] >= log[i - 1]);
    }
}

TEST_CASE("content filter is surfaced without retry") {
    auto provider = std::make_unique<ScriptedProvider>(std::deque<ScriptedProvider::Outcome>{
        []() -> CompletionResponse { return {"", FinishReason::content_filter, {20, 0}, 1}; }});
    auto* raw = provider.get();
    Client client(mock_config(), std::move(provider), [](double) {});
    try {
        client.complete({text_prompt("q"), {}, {}});
        FAIL("expected ContentFiltered");
    } catch (const ContentFiltered& e) {
        CHECK(e.usage() == Usage{20, 0});
    }
    CHECK(raw->calls == 1);
    CHECK(client.totals().usage == Usage{20, 0});
}

TEST_CASE("client totals equal the sum of per-call usage under concurrency") {
    std::map<std::pair<std::string, int>, MockProvider::Entry> entries;
    for (int i = 0; i < 40; ++i) {
        MockProvider::Entry e;
        e.text = "Answer: " + std::to_string(i);
        e.prompt_tokens = 10 + i;
        e.completion_tokens = i % 7;
        entries[{"q" + std::to_string(i), 0}] = e;
    }
    Client client(mock_config(), std::make_unique<MockProvider>(entries), [](double) {});
    std::vector<Usage> per_call(40);
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < 40; i += 4) {
                per_call[static_cast<std::size_t>(i)] =
                    client.complete({text_prompt("q"), {}, {"q" + std::to_string(i), 0}}).usage;
            }
        });
    }
    workers.clear();
    Usage sum;
    for (const auto& u : per_call) sum += u;
    CHECK(client.totals().usage == sum);
    CHECK(client.totals().calls == 40);
}

TEST_CASE("rate limiter waits out the window when the request budget is spent") {
    double now = 0.0;
    std::vector<double> waits;
    RateLimiter limiter(2, 0, [&] { return now; }, [&](double s) {
        waits.push_back(s);
        now += s;
    });
    limiter.acquire();
    limiter.acquire();
    CHECK(waits.empty());
    limiter.acquire();
    REQUIRE_FALSE(waits.empty());
    CHECK(now >= 60.0);
}

TEST_CASE("rate limiter throttles on token volume") {
    double now = 0.0;
    RateLimiter limiter(0, 100, [&] { return now; }, [&](double s) { now += s; });
    limiter.acquire();
    limiter.record_tokens(150);
    limiter.acquire();
    CHECK(now >= 60.0);
}

TEST_CASE("http request body carries base64 images and deterministic decoding") {
    ChatRequest req{{ChatMessage::text(Role::system, "s"), image_message()}, default_params(ParamStage::initial), {}};
    const auto body = HttpProvider::request_body(req, "model-x");
    CHECK(body["model"] == "model-x");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["max_tokens"] == 2048);
    CHECK(body.contains("seed"));
    const auto& parts = body["messages"][1]["content"];
    const std::vector<std::uint8_t> png{0x89, 'P', 'N', 'G'};
    CHECK(parts[1]["image_url"]["url"] == "data:image/png;base64," + base64_encode(png));
    CHECK(body.dump().find("instance_id") == std::string::npos);
}

TEST_CASE("http response parsing") {
    const auto ok = HttpProvider::parse_response(nlohmann::json::parse(
        R"({"choices":[{"message":{"content":"Answer: 3"},"finish_reason":"stop"}],"usage":{"prompt_tokens":5,"completion_tokens":2}})"));
    CHECK(ok.text == "Answer: 3");
    CHECK(ok.usage == Usage{5, 2});
    CHECK_THROWS_AS(HttpProvider::parse_response(nlohmann::json::parse(R"({"choices":[]})")), TransportError);
}

namespace {

struct LocalServer {
    httplib::Server server;
    int port = 0;
    std::jthread thread;

    LocalServer() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::jthread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() { server.stop(); }

    ProviderConfig config() const {
        ProviderConfig c;
        c.kind = ProviderKind::http;
        c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
        c.credentials_env_var = "WOT_TEST_API_KEY";
        c.retry = {3, 0.01};
        c.request_timeout_seconds = 5;
        return c;
    }
};

const char* kOkBody =
    R"({"choices":[{"message":{"content":"Answer: 9"},"finish_reason":"stop"}],"usage":{"prompt_tokens":4,"completion_tokens":1}})";

}  // namespace

TEST_CASE("http provider against a local endpoint") {
    ::setenv("WOT_TEST_API_KEY", "test-key", 1);
    LocalServer srv;
    std::atomic<int> hits{0};
    std::string seen_auth;
    std::string seen_path;
    srv.server.Post(R"(/v1/chat/completions)", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_path = req.path;
        const auto body = nlohmann::json::parse(req.body);
        const std::string mode = body["messages"].back()["content"].is_string()
                                     ? body["messages"].back()["content"].get<std::string>()
                                     : std::string("image");
        if (mode == "flaky" && hits++ == 0) {
            res.status = 429;
            res.set_header("Retry-After", "0");
            res.set_content(R"({"error":{"message":"slow down"}})", "application/json");
            return;
        }
        if (mode == "deny") {
            res.status = 401;
            res.set_content(R"({"error":{"message":"bad key"}})", "application/json");
            return;
        }
        if (mode == "filtered") {
            res.status = 400;
            res.set_content(R"({"error":{"code":"content_filter","message":"blocked"}})", "application/json");
            return;
        }
        if (mode == "broken") {
            res.status = 500;
            res.set_content("oops", "text/plain");
            return;
        }
        res.set_content(kOkBody, "application/json");
    });

    Client client(srv.config(), std::make_unique<HttpProvider>(srv.config()), [](double) {});

    SUBCASE("success") {
        const auto r = client.complete({text_prompt("plain"), default_params(ParamStage::initial), {}});
        CHECK(r.text == "Answer: 9");
        CHECK(r.usage == Usage{4, 1});
        CHECK(seen_auth == "Bearer test-key");
        CHECK(seen_path == "/v1/chat/completions");
    }
    SUBCASE("429 then success") {
        const auto r = client.complete({text_prompt("flaky"), default_params(ParamStage::initial), {}});
        CHECK(r.attempts == 2);
    }
    SUBCASE("401 is an auth error") {
        CHECK_THROWS_AS(client.complete({text_prompt("deny"), {}, {}}), AuthError);
    }
    SUBCASE("content filter refusal") {
        CHECK_THROWS_AS(client.complete({text_prompt("filtered"), {}, {}}), ContentFiltered);
    }
    SUBCASE("persistent 5xx becomes a transport error") {
        CHECK_THROWS_AS(client.complete({text_prompt("broken"), {}, {}}), TransportError);
        CHECK(client.totals().attempts == 3);
    }
    SUBCASE("image request round trip") {
        const auto r = client.complete({{image_message()}, default_params(ParamStage::image_followup), {}});
        CHECK(r.text == "Answer: 9");
    }
}

TEST_CASE("missing credentials fail before any request") {
    ::unsetenv("WOT_TEST_MISSING_KEY");
    ProviderConfig c;
    c.kind = ProviderKind::http;
    c.base_url = "http://127.0.0.1:9/v1";
    c.credentials_env_var = "WOT_TEST_MISSING_KEY";
    HttpProvider p(c);
    CHECK_THROWS_AS(p.send({text_prompt("q"), {}, {}}), AuthError);
}

TEST_CASE("provider config validation") {
    ProviderConfig c;
    c.kind = ProviderKind::http;
    CHECK_THROWS_AS(validate(c), ConfigError);
    CHECK_THROWS_AS(provider_config_from_json(nlohmann::json{{"kind", "carrier-pigeon"}}), ConfigError);
    const auto m = provider_config_from_json({{"kind", "mock"}, {"fixture_path", "f.jsonl"}});
    CHECK(m.kind == ProviderKind::mock);
    CHECK(m.retry.max_attempts == 3);
}
