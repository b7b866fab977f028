#include "mmwoz/render.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/gui.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>

namespace mmwoz::render {
namespace {

constexpr std::uint8_t kFont[95][16] = {
#include "mmwoz/detail/font8x16.inc"
};

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{20, 20, 20};
constexpr Rgb kNavy{32, 56, 100};
constexpr Rgb kMenuBand{230, 234, 240};
constexpr Rgb kMenuIdle{214, 220, 232};
constexpr Rgb kFrame{176, 180, 188};
constexpr Rgb kFieldBorder{120, 124, 130};
constexpr Rgb kLabel{84, 88, 96};
constexpr Rgb kButton{70, 110, 180};
constexpr Rgb kRow{244, 245, 247};
constexpr Rgb kRowSelected{255, 236, 179};
constexpr Rgb kMessage{190, 30, 30};

class Canvas {
public:
    explicit Canvas(Image& img) : img_(img) {}

    void fill(BBox b, Rgb c) {
        b = clip(b, {0, 0, img_.width, img_.height});
        for (int y = b.y1; y < b.y2; ++y) {
            for (int x = b.x1; x < b.x2; ++x) img_.set(x, y, c);
        }
    }

    void frame(BBox b, Rgb c) {
        fill({b.x1, b.y1, b.x2, b.y1 + 1}, c);
        fill({b.x1, b.y2 - 1, b.x2, b.y2}, c);
        fill({b.x1, b.y1, b.x1 + 1, b.y2}, c);
        fill({b.x2 - 1, b.y1, b.x2, b.y2}, c);
    }

    /// Draws text with its top-left at (x, y), clipped to `clip_box`.
    void text(int x, int y, std::string_view s, Rgb c, BBox clip_box) {
        clip_box = clip(clip_box, {0, 0, img_.width, img_.height});
        for (char ch : s) {
            for (int row = 0; row < 16; ++row) {
                const std::uint8_t bits = glyph_row(ch, row);
                for (int col = 0; col < 8; ++col) {
                    if ((bits & (0x80 >> col)) == 0) continue;
                    const Point p{x + col, y + row};
                    if (clip_box.contains(p)) img_.set(p.x, p.y, c);
                }
            }
            x += layout::kCharWidth;
        }
    }

private:
    static BBox clip(BBox b, BBox bounds) {
        return {std::max(b.x1, bounds.x1), std::max(b.y1, bounds.y1), std::min(b.x2, bounds.x2),
                std::min(b.y2, bounds.y2)};
    }

    Image& img_;
};

void draw_element(Canvas& cv, const Element& e) {
    const BBox& b = e.bbox;
    const int ty = b.y1 + 1;
    switch (e.role) {
        case ElementRole::header:
            cv.text(b.x1 + 2, ty, e.text, kWhite, b);
            break;
        case ElementRole::menu_item:
            cv.fill(b, e.checked ? kNavy : kMenuIdle);
            cv.text(b.x1 + 8, ty, e.text, e.checked ? kWhite : kBlack, b);
            break;
        case ElementRole::title:
            cv.text(b.x1 + 2, ty, e.text, kNavy, b);
            cv.fill({b.x1, b.y2 - 1, b.x2, b.y2}, kNavy);
            break;
        case ElementRole::label:
            cv.text(b.x1 + 2, ty, e.text, kLabel, b);
            break;
        case ElementRole::text_field:
            cv.fill(b, kWhite);
            cv.frame(b, kFieldBorder);
            cv.text(b.x1 + 4, ty, e.text, kBlack, {b.x1 + 1, b.y1 + 1, b.x2 - 1, b.y2 - 1});
            break;
        case ElementRole::checkbox: {
            const BBox box{b.x1 + 2, b.y1 + 3, b.x1 + 14, b.y1 + 15};
            cv.fill(box, kWhite);
            cv.frame(box, kFieldBorder);
            if (e.checked) cv.fill({box.x1 + 2, box.y1 + 2, box.x2 - 2, box.y2 - 2}, kBlack);
            cv.text(b.x1 + 18, ty, e.text, kBlack, b);
            break;
        }
        case ElementRole::button:
            cv.fill(b, kButton);
            cv.text(b.x1 + 8, ty, e.text, kWhite, b);
            break;
        case ElementRole::result_row:
            cv.fill(b, e.checked ? kRowSelected : kRow);
            cv.frame(b, kFrame);
            cv.text(b.x1 + 4, ty, e.text, kBlack, {b.x1 + 1, b.y1, b.x2 - 1, b.y2});
            break;
        case ElementRole::message:
            cv.text(b.x1 + 2, ty, e.text, kMessage, b);
            break;
        case ElementRole::count:
        case ElementRole::info:
        case ElementRole::outcome:
            cv.text(b.x1 + 2, ty, e.text, kBlack, b);
            break;
    }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::array<std::uint8_t, 3> Image::pixel(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, std::array<std::uint8_t, 3> c) {
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    rgb[i] = c[0];
    rgb[i + 1] = c[1];
    rgb[i + 2] = c[2];
}

std::uint8_t glyph_row(char c, int row) {
    auto code = static_cast<unsigned char>(c);
    if (code < 0x20 || code > 0x7e) code = '?';
    if (row < 0 || row >= 16) return 0;
    return kFont[code - 0x20][row];
}

Image rasterize(const layout::Layout& lay) {
    Image img(lay.width, lay.height);
    Canvas cv(img);
    cv.fill({0, 0, lay.width, lay.height}, kWhite);
    cv.fill({0, 0, lay.width, layout::kHeaderBottom}, kNavy);
    cv.fill({0, layout::kMenuTop - 6, lay.width, layout::kMenuTop + layout::kTextHeight + 6}, kMenuBand);
    const auto frames = layout::column_frames({lay.width, lay.height, PerturbMode::none, 0});
    for (const auto& f : {frames.finding, frames.results, frames.side}) cv.frame(f, kFrame);
    for (const auto& e : lay.elements) draw_element(cv, e);
    return img;
}

Snapshot snapshot(const gui::GuiState& state, const layout::Layout& lay, bool with_image) {
    Snapshot snap;
    snap.elements = lay;
    snap.state_digest = gui::state_digest(state);
    for (const auto& e : lay.elements) {
        if (!e.text.empty()) snap.text_dump.push_back({e.text, e.bbox});
    }
    if (with_image) snap.image = rasterize(lay);
    return snap;
}

std::string serialize_text_dump(const Snapshot& snap) {
    std::string out;
    for (const auto& line : snap.text_dump) {
        out += line.text;
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    std::vector<std::uint8_t> raw;
    const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
    raw.reserve((stride + 1) * static_cast<std::size_t>(image.height));
    for (int y = 0; y < image.height; ++y) {
        raw.push_back(0);  // filter: none
        const auto* row = image.rgb.data() + static_cast<std::size_t>(y) * stride;
        raw.insert(raw.end(), row, row + stride);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_size);
    if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw IoError("zlib compression failed");
    }
    packed.resize(packed_size);

    std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> header;
    put_u32(header, static_cast<std::uint32_t>(image.width));
    put_u32(header, static_cast<std::uint32_t>(image.height));
    header.insert(header.end(), {8, 2, 0, 0, 0});  // 8-bit RGB, no interlace
    put_chunk(out, "IHDR", header);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

}  // namespace mmwoz::render
