#pragma once

#include "wot/common/image.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wot::ascii {

/// Monospace bitmap font covering printable ASCII (32..126). Each glyph is
/// `cell_height` rows; bit (cell_width - 1 - x) of a row is pixel x.
class GlyphFont {
public:
    GlyphFont(int cell_width, int cell_height, std::vector<std::uint32_t> rows);

    int cell_width() const { return cell_width_; }
    int cell_height() const { return cell_height_; }

    /// Rows for `c`; anything outside 32..126 uses the space glyph.
    std::span<const std::uint32_t> glyph(char c) const;
    bool ink(char c, int x, int y) const;

private:
    int cell_width_;
    int cell_height_;
    std::vector<std::uint32_t> rows_;
};

/// The built-in 8x16 font, identical on every platform.
const GlyphFont& embedded_font();

/// Draws `art` in black on white (RGB). Rows split on '\n' with a trailing
/// '\r' dropped; short rows are padded with spaces. Size is
/// (longest_row * cell_w + 2 * margin) x (rows * cell_h + 2 * margin);
/// the empty string has zero rows.
Image rasterize_ascii(std::string_view art, const GlyphFont& font, int margin_px);

}  // namespace wot::ascii
