#!/usr/bin/env python3
"""Regenerates include/mmwoz/detail/font8x16.inc from DejaVu Sans Mono.

Each printable ASCII glyph (0x20..0x7e) is rasterized into an 8x16 cell and
thresholded to 1 bit per pixel. Row bytes are MSB-first (bit 7 = leftmost).
The generated table is checked in, so the build never depends on this script
or on a system font.
"""
import argparse
from PIL import Image, ImageDraw, ImageFont

FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono.ttf"


def glyph_rows(font, ch):
    img = Image.new("L", (8, 16), 0)
    draw = ImageDraw.Draw(img)
    draw.text((0, -1), ch, font=font, fill=255)
    rows = []
    for y in range(16):
        byte = 0
        for x in range(8):
            if img.getpixel((x, y)) >= 110:
                byte |= 0x80 >> x
        rows.append(byte)
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--font", default=FONT)
    ap.add_argument("--size", type=int, default=13)
    ap.add_argument("out")
    args = ap.parse_args()
    font = ImageFont.truetype(args.font, args.size)
    with open(args.out, "w") as f:
        f.write("// Generated by tools/gen_font.py from DejaVu Sans Mono. Do not edit.\n")
        f.write("// 95 glyphs (0x20..0x7e), 16 rows each, MSB = leftmost pixel.\n")
        for code in range(0x20, 0x7F):
            rows = glyph_rows(font, chr(code))
            f.write("{" + ",".join(f"0x{r:02x}" for r in rows) + "},")
            f.write(f"  // {code:#04x}\n")


if __name__ == "__main__":
    main()
