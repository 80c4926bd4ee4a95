#include "wot/sandbox/postprocess.hpp"

#include <algorithm>
#include <cmath>

namespace wot::sandbox {

void validate(const PostProcessConfig& config) {
    if (config.border_px < 0) throw std::invalid_argument("border_px must be >= 0");
    if (config.max_dimension_px < 64) throw std::invalid_argument("max_dimension_px must be >= 64");
}

PostProcessConfig postprocess_config_from_json(const nlohmann::json& j) {
    PostProcessConfig c;
    c.border_px = j.value("border_px", c.border_px);
    c.max_dimension_px = j.value("max_dimension_px", c.max_dimension_px);
    if (j.contains("border_color")) {
        const auto rgb = j["border_color"].get<std::vector<int>>();
        if (rgb.size() != 3) throw std::invalid_argument("border_color must be [r, g, b]");
        for (int v : rgb) {
            if (v < 0 || v > 255) throw std::invalid_argument("border_color components must be 0..255");
        }
        c.border_color = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                          static_cast<std::uint8_t>(rgb[2])};
    }
    validate(c);
    return c;
}

nlohmann::json to_json(const PostProcessConfig& c) {
    return {{"border_px", c.border_px},
            {"border_color", {c.border_color.r, c.border_color.g, c.border_color.b}},
            {"max_dimension_px", c.max_dimension_px}};
}

Image add_border(const Image& image, int border_px, Rgb color) {
    if (border_px < 0) throw std::invalid_argument("border_px must be >= 0");
    if (border_px == 0) return image;

    const int w = image.width();
    const int h = image.height();
    const int ch = image.channels();
    Image out(w + 2 * border_px, h + 2 * border_px, ch);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) out.set(x, y, color);
    }
    const std::size_t row_bytes = static_cast<std::size_t>(w) * static_cast<std::size_t>(ch);
    for (int y = 0; y < h; ++y) {
        std::copy_n(image.pixel(0, y), row_bytes, out.pixel(border_px, y + border_px));
    }
    return out;
}

std::pair<int, int> fitted_size(int width, int height, int max_dimension) {
    if (max_dimension <= 0) throw std::invalid_argument("max_dimension must be positive");
    const int major = std::max(width, height);
    if (major <= max_dimension) return {width, height};
    auto scale_minor = [&](int minor) {
        const long long num = 2LL * minor * max_dimension + major;
        return std::max(1, static_cast<int>(num / (2LL * major)));
    };
    if (width >= height) return {max_dimension, scale_minor(height)};
    return {scale_minor(width), max_dimension};
}

Image resize_max(const Image& image, int max_dimension) {
    const auto [dw, dh] = fitted_size(image.width(), image.height(), max_dimension);
    if (dw == image.width() && dh == image.height()) return image;

    const int sw = image.width();
    const int sh = image.height();
    const int ch = image.channels();
    Image out(dw, dh, ch);
    const double sx = static_cast<double>(sw) / dw;
    const double sy = static_cast<double>(sh) / dh;
    for (int y = 0; y < dh; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, sh - 1);
        const double wy = fy - y0;
        for (int x = 0; x < dw; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, sw - 1);
            const double wx = fx - x0;
            const std::uint8_t* p00 = image.pixel(x0, y0);
            const std::uint8_t* p10 = image.pixel(x1, y0);
            const std::uint8_t* p01 = image.pixel(x0, y1);
            const std::uint8_t* p11 = image.pixel(x1, y1);
            std::uint8_t* dst = out.pixel(x, y);
            for (int c = 0; c < ch; ++c) {
                const double top = p00[c] + (p10[c] - p00[c]) * wx;
                const double bottom = p01[c] + (p11[c] - p01[c]) * wx;
                dst[c] = static_cast<std::uint8_t>(std::lround(top + (bottom - top) * wy));
            }
        }
    }
    return out;
}

llm::ImagePart prepare_image(const Image& image, const PostProcessConfig& config) {
    validate(config);
    const Image framed = add_border(image, config.border_px, config.border_color);
    return {encode_png(resize_max(framed, config.max_dimension_px)), "image/png"};
}

llm::ImagePart prepare_for_query(const ExecutionResult& result, const PostProcessConfig& config) {
    if (result.status != ExecutionStatus::ok || result.images.empty()) {
        throw PreconditionError("prepare_for_query needs a successful execution with an image, got status " +
                                std::string(to_string(result.status)));
    }
    return prepare_image(read_png_file(result.images.front().path), config);
}

}  // namespace wot::sandbox
