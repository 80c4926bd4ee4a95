#!/usr/bin/env python3
"""Regenerate src/ascii/glyph_font_data.inc from DejaVu Sans Mono.

Each printable ASCII glyph (32..126) is rendered into an 8x16 cell and
thresholded to one bit per pixel. Output rows are one byte each, MSB is
the leftmost pixel.
"""
import sys

import matplotlib
from PIL import Image, ImageDraw, ImageFont

CELL_W, CELL_H = 8, 16
FONT_PATH = f"{matplotlib.get_data_path()}/fonts/ttf/DejaVuSansMono.ttf"


def main(out_path):
    font = ImageFont.truetype(FONT_PATH, 13)
    ascent, _ = font.getmetrics()
    lines = [
        "// Generated by tools/gen_glyph_font.py from DejaVu Sans Mono. Do not edit.",
        f"// {CELL_W}x{CELL_H} cells, codes 32..126, one byte per row, MSB = leftmost pixel.",
    ]
    for code in range(32, 127):
        img = Image.new("L", (CELL_W, CELL_H), 0)
        draw = ImageDraw.Draw(img)
        draw.text((0, CELL_H - 3 - ascent), chr(code), fill=255, font=font)
        rows = []
        for y in range(CELL_H):
            bits = 0
            for x in range(CELL_W):
                if img.getpixel((x, y)) >= 128:
                    bits |= 0x80 >> x
            rows.append(f"0x{bits:02x}")
        label = chr(code) if chr(code) not in "\\'" else "\\" + chr(code)
        lines.append(f"/* {code:3d} '{label}' */ {', '.join(rows)},")
    with open(out_path, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/ascii/glyph_font_data.inc")
