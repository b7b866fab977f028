#pragma once

#include "mmwoz/layout.hpp"
#include "mmwoz/state.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmwoz::render {

/// Packed 8-bit RGB raster, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

    [[nodiscard]] std::array<std::uint8_t, 3> pixel(int x, int y) const;
    void set(int x, int y, std::array<std::uint8_t, 3> c);

    bool operator==(const Image&) const = default;
};

struct TextLine {
    std::string text;
    BBox bbox;
    bool operator==(const TextLine&) const = default;
};

/// One observation of the page: the raster, the ground-truth text in reading
/// order (the role OCR output plays for an agent), and the layout it came from.
struct Snapshot {
    std::optional<Image> image;
    std::vector<TextLine> text_dump;
    layout::Layout elements;
    std::uint64_t state_digest = 0;
};

/// Builds the snapshot of `state` under `layout`. The raster is produced only
/// when `with_image` is set; rasterize() can fill it in later from `elements`.
Snapshot snapshot(const gui::GuiState& state, const layout::Layout& layout, bool with_image = true);

/// Deterministic rendering of a layout: panel frames, element boxes, checkbox
/// glyphs and 8x16 bitmap text, no anti-aliasing.
Image rasterize(const layout::Layout& layout);

/// One line per text element, in layout order.
std::string serialize_text_dump(const Snapshot& snap);

/// PNG (RGB, 8-bit, zlib level 6) encoding.
std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);

/// Glyph row bits for a printable ASCII character (MSB = leftmost). Non-printable maps to '?'.
std::uint8_t glyph_row(char c, int row);

}  // namespace mmwoz::render
