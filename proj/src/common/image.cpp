#include "wot/common/image.hpp"

#include <png.h>

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>

namespace wot {

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("image dimensions must be nonnegative");
    }
    if (channels != 1 && channels != 3 && channels != 4) {
        throw std::invalid_argument("image channel count must be 1, 3 or 4");
    }
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                       static_cast<std::size_t>(channels),
                   fill);
}

void Image::set(int x, int y, Rgb color) {
    std::uint8_t* p = pixel(x, y);
    switch (channels_) {
        case 1:
            // ITU-R BT.601 luma, integer form.
            p[0] = static_cast<std::uint8_t>((299 * color.r + 587 * color.g + 114 * color.b + 500) / 1000);
            break;
        case 4:
            p[3] = 255;
            [[fallthrough]];
        case 3:
            p[0] = color.r;
            p[1] = color.g;
            p[2] = color.b;
            break;
        default:
            break;
    }
}

Rgb Image::rgb(int x, int y) const {
    const std::uint8_t* p = pixel(x, y);
    if (channels_ == 1) {
        return {p[0], p[0], p[0]};
    }
    return {p[0], p[1], p[2]};
}

namespace {

png_uint_32 format_for(int channels) {
    switch (channels) {
        case 1: return PNG_FORMAT_GRAY;
        case 3: return PNG_FORMAT_RGB;
        case 4: return PNG_FORMAT_RGBA;
        default: throw EncodeError("unsupported channel count");
    }
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.width() <= 0 || image.height() <= 0) {
        throw EncodeError("cannot encode an empty image as PNG");
    }
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width());
    desc.height = static_cast<png_uint_32>(image.height());
    desc.format = format_for(image.channels());

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(desc, size, 0, image.bytes().data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw EncodeError("png size query failed: " + msg);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.bytes().data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw EncodeError("png encode failed: " + msg);
    }
    out.resize(size);
    return out;
}

Image decode_png(std::span<const std::uint8_t> data) {
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, data.data(), data.size())) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw DecodeError("png decode failed: " + msg);
    }

    int channels = 3;
    const bool has_alpha = (desc.format & PNG_FORMAT_FLAG_ALPHA) != 0;
    const bool is_color = (desc.format & PNG_FORMAT_FLAG_COLOR) != 0;
    if (has_alpha) {
        desc.format = PNG_FORMAT_RGBA;
        channels = 4;
    } else if (is_color) {
        desc.format = PNG_FORMAT_RGB;
    } else {
        desc.format = PNG_FORMAT_GRAY;
        channels = 1;
    }

    Image image(static_cast<int>(desc.width), static_cast<int>(desc.height), channels);
    if (!png_image_finish_read(&desc, nullptr, image.bytes().data(), 0, nullptr)) {
        std::string msg = desc.message;
        png_image_free(&desc);
        throw DecodeError("png decode failed: " + msg);
    }
    return image;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw std::runtime_error("short write to " + path.string());
    }
}

Image read_png_file(const std::filesystem::path& path) {
    std::vector<std::uint8_t> data;
    try {
        data = read_binary_file(path);
    } catch (const std::runtime_error& e) {
        throw DecodeError(e.what());
    }
    return decode_png(data);
}

void write_png_file(const std::filesystem::path& path, const Image& image) {
    write_binary_file(path, encode_png(image));
}

PngSize png_dimensions(const std::filesystem::path& path) {
    static constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::ifstream in(path, std::ios::binary);
    std::array<std::uint8_t, 24> head{};
    if (!in.read(reinterpret_cast<char*>(head.data()), head.size())) {
        throw DecodeError("truncated png: " + path.string());
    }
    if (!std::equal(kSignature.begin(), kSignature.end(), head.begin()) ||
        std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
        throw DecodeError("not a png: " + path.string());
    }
    auto be32 = [&](std::size_t at) {
        return static_cast<int>((std::uint32_t{head[at]} << 24) | (std::uint32_t{head[at + 1]} << 16) |
                                (std::uint32_t{head[at + 2]} << 8) | std::uint32_t{head[at + 3]});
    };
    return {be32(16), be32(20)};
}

}  // namespace wot
