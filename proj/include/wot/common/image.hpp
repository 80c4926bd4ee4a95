#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wot {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    static constexpr Rgb white() { return {255, 255, 255}; }
    static constexpr Rgb black() { return {0, 0, 0}; }
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit raster, row-major, top row first.
/// Channel count is 1 (gray), 3 (RGB) or 4 (RGBA).
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, std::uint8_t fill = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return pixels_.empty(); }

    std::uint8_t* pixel(int x, int y) { return pixels_.data() + offset(x, y); }
    const std::uint8_t* pixel(int x, int y) const { return pixels_.data() + offset(x, y); }

    std::span<const std::uint8_t> bytes() const { return pixels_; }
    std::span<std::uint8_t> bytes() { return pixels_; }

    /// Writes `color` into (x, y); alpha, when present, is set opaque.
    void set(int x, int y, Rgb color);
    Rgb rgb(int x, int y) const;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> pixels_;
};

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_png(const Image& image);

/// Decodes to the file's natural channel count (gray, RGB or RGBA).
Image decode_png(std::span<const std::uint8_t> data);

Image read_png_file(const std::filesystem::path& path);
void write_png_file(const std::filesystem::path& path, const Image& image);

struct PngSize {
    int width = 0;
    int height = 0;
};

/// Reads only the IHDR chunk. Throws DecodeError on a non-PNG header.
PngSize png_dimensions(const std::filesystem::path& path);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace wot
