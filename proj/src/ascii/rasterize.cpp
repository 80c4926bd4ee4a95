#include "wot/ascii/rasterize.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wot::ascii {

namespace {

constexpr int kFirstPrintable = 32;
constexpr int kLastPrintable = 126;
constexpr int kGlyphCount = kLastPrintable - kFirstPrintable + 1;

constexpr std::uint8_t kEmbeddedRows[] = {
#include "glyph_font_data.inc"
};

static_assert(sizeof kEmbeddedRows == kGlyphCount * 16, "embedded font must hold 95 glyphs of 16 rows");

std::vector<std::string_view> split_rows(std::string_view art) {
    std::vector<std::string_view> rows;
    if (art.empty()) return rows;
    std::size_t start = 0;
    for (;;) {
        const auto nl = art.find('\n', start);
        std::string_view row = art.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
        rows.push_back(row);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return rows;
}

}  // namespace

GlyphFont::GlyphFont(int cell_width, int cell_height, std::vector<std::uint32_t> rows)
    : cell_width_(cell_width), cell_height_(cell_height), rows_(std::move(rows)) {
    if (cell_width <= 0 || cell_width > 32 || cell_height <= 0) {
        throw std::invalid_argument("glyph cell must be 1..32 px wide and at least 1 px tall");
    }
    if (rows_.size() != static_cast<std::size_t>(kGlyphCount) * static_cast<std::size_t>(cell_height)) {
        throw std::invalid_argument("glyph font must define every printable ASCII character");
    }
}

std::span<const std::uint32_t> GlyphFont::glyph(char c) const {
    int code = static_cast<unsigned char>(c);
    if (code < kFirstPrintable || code > kLastPrintable) code = ' ';
    const auto h = static_cast<std::size_t>(cell_height_);
    return std::span(rows_).subspan(static_cast<std::size_t>(code - kFirstPrintable) * h, h);
}

bool GlyphFont::ink(char c, int x, int y) const {
    return ((glyph(c)[static_cast<std::size_t>(y)] >> (cell_width_ - 1 - x)) & 1U) != 0;
}

const GlyphFont& embedded_font() {
    static const GlyphFont font(8, 16, std::vector<std::uint32_t>(std::begin(kEmbeddedRows), std::end(kEmbeddedRows)));
    return font;
}

Image rasterize_ascii(std::string_view art, const GlyphFont& font, int margin_px) {
    if (margin_px < 0) throw std::invalid_argument("margin must be >= 0");
    const auto rows = split_rows(art);
    std::size_t columns = 0;
    for (auto row : rows) columns = std::max(columns, row.size());

    const int cw = font.cell_width();
    const int ch = font.cell_height();
    Image image(static_cast<int>(columns) * cw + 2 * margin_px, static_cast<int>(rows.size()) * ch + 2 * margin_px, 3,
                255);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t col = 0; col < rows[r].size(); ++col) {
            const char c = rows[r][col];
            const int ox = margin_px + static_cast<int>(col) * cw;
            const int oy = margin_px + static_cast<int>(r) * ch;
            for (int y = 0; y < ch; ++y) {
                for (int x = 0; x < cw; ++x) {
                    if (font.ink(c, x, y)) image.set(ox + x, oy + y, Rgb::black());
                }
            }
        }
    }
    return image;
}

}  // namespace wot::ascii
