#include "doctest.h"
#include "support.hpp"

#include "wot/common/digest.hpp"
#include "wot/common/image.hpp"
#include "wot/common/rng.hpp"
#include "wot/common/task.hpp"

#include <set>

using namespace wot;

TEST_CASE("sha256 and base64 match published test vectors") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string foobar = "foobar";
    for (std::size_t n = 0; n <= foobar.size(); ++n) {
        static const char* expected[] = {"", "Zg==", "Zm8=", "Zm9v", "Zm9vYg==", "Zm9vYmE=", "Zm9vYmFy"};
        const std::vector<std::uint8_t> bytes(foobar.begin(), foobar.begin() + static_cast<long>(n));
        CHECK(base64_encode(bytes) == expected[n]);
    }
}

TEST_CASE("png round trip keeps pixels and channel count") {
    for (int channels : {1, 3, 4}) {
        Image img(7, 5, channels);
        for (int y = 0; y < 5; ++y) {
            for (int x = 0; x < 7; ++x) {
                img.set(x, y, Rgb{static_cast<std::uint8_t>(x * 30), static_cast<std::uint8_t>(y * 40), 9});
            }
        }
        const auto bytes = encode_png(img);
        const Image back = decode_png(bytes);
        CHECK(back.channels() == channels);
        CHECK(back == img);
        CHECK(encode_png(back) == bytes);
    }
}

TEST_CASE("png_dimensions reads the header and rejects other files") {
    const auto dir = test::scratch_dir("common_png");
    write_png_file(dir / "a.png", Image(33, 17, 3));
    const auto [w, h] = png_dimensions(dir / "a.png");
    CHECK(w == 33);
    CHECK(h == 17);
    test::write_text(dir / "b.png", "not a png at all");
    CHECK_THROWS_AS(png_dimensions(dir / "b.png"), DecodeError);
    CHECK_THROWS_AS(decode_png(std::vector<std::uint8_t>{1, 2, 3}), DecodeError);
}

TEST_CASE("rng is reproducible and stays in range") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = r.below(6);
        CHECK(v < 6);
        seen.insert(v);
        const auto w = r.between(-3, 3);
        CHECK(w >= -3);
        CHECK(w <= 3);
    }
    CHECK(seen.size() == 6);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}

TEST_CASE("task kinds and error categories round trip through text") {
    for (auto k : {TaskKind::ascii_mnist, TaskKind::ascii_word, TaskKind::ascii_kanji, TaskKind::navigation}) {
        CHECK(parse_task_kind(to_string(k)) == k);
    }
    CHECK(parse_task_kind("nav") == TaskKind::navigation);
    CHECK_THROWS_AS(parse_task_kind("chess"), ParseError);
    for (auto c : {ErrorCategory::no_code, ErrorCategory::code_execution, ErrorCategory::content_filtered,
                   ErrorCategory::provider_error, ErrorCategory::needs_review, ErrorCategory::poor_visualization,
                   ErrorCategory::visual_perception}) {
        CHECK(parse_error_category(to_string(c)) == c);
    }
    CHECK_FALSE(parse_error_category("bad_luck").has_value());
}
