#include "support.hpp"

#include "mmwoz/render.hpp"

#include <zlib.h>

using namespace mmwoz;
using mmwoz::testing::click;
using mmwoz::testing::element;
using mmwoz::testing::full_db;
using mmwoz::testing::type;

namespace {

std::uint32_t crc32_bitwise(const std::uint8_t* p, std::size_t n) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) {
        c ^= p[i];
        for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
    }
    return c ^ 0xFFFFFFFFu;
}

std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// Minimal PNG reader for 8-bit RGB, filter 0 rows: exactly what encode_png claims to write.
render::Image decode(const std::vector<std::uint8_t>& png) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    EXPECT_TRUE(std::equal(sig, sig + 8, png.begin()));
    std::size_t pos = 8;
    int w = 0, h = 0;
    std::vector<std::uint8_t> idat;
    bool end = false;
    while (pos + 12 <= png.size()) {
        const std::uint32_t len = be32(&png[pos]);
        const std::string type(png.begin() + static_cast<long>(pos) + 4, png.begin() + static_cast<long>(pos) + 8);
        const std::uint8_t* data = &png[pos + 8];
        EXPECT_EQ(be32(data + len), crc32_bitwise(&png[pos + 4], len + 4)) << type;
        if (type == "IHDR") {
            w = static_cast<int>(be32(data));
            h = static_cast<int>(be32(data + 4));
            EXPECT_EQ(data[8], 8);
            EXPECT_EQ(data[9], 2);
        } else if (type == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (type == "IEND") {
            end = true;
        }
        pos += 12 + len;
    }
    EXPECT_TRUE(end);
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * 3));
    uLongf raw_len = raw.size();
    EXPECT_EQ(uncompress(raw.data(), &raw_len, idat.data(), idat.size()), Z_OK);
    EXPECT_EQ(raw_len, raw.size());
    render::Image img(w, h);
    for (int y = 0; y < h; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * (1 + static_cast<std::size_t>(w) * 3);
        EXPECT_EQ(raw[row], 0);
        std::copy_n(raw.begin() + static_cast<long>(row) + 1, w * 3,
                    img.rgb.begin() + static_cast<long>(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) * 3));
    }
    return img;
}

gui::GuiState searched() {
    auto s = gui::new_session(full_db(), "R1", {});
    s = type(s, "restaurant.finding.food", "indian");
    s = click(s, "restaurant.finding.area.centre");
    return click(s, "restaurant.finding.search");
}

std::uint64_t block_sum(const render::Image& img, const BBox& b) {
    std::uint64_t h = 1469598103934665603ULL;
    for (int y = b.y1; y < b.y2; ++y) {
        for (int x = b.x1; x < b.x2; ++x) {
            for (auto c : img.pixel(x, y)) h = (h ^ c) * 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace

TEST(Render, PngRoundTripsThroughIndependentDecoder) {
    const auto s = searched();
    const auto img = render::rasterize(layout::current_layout(s));
    EXPECT_EQ(img.width, 1280);
    EXPECT_EQ(img.height, 960);
    EXPECT_EQ(decode(render::encode_png(img)), img);
}

TEST(Render, ByteDeterministic) {
    const auto s = searched();
    const auto a = render::snapshot(s, layout::current_layout(s));
    const auto b = render::snapshot(s, layout::current_layout(s));
    ASSERT_TRUE(a.image && b.image);
    EXPECT_EQ(render::encode_png(*a.image), render::encode_png(*b.image));
    EXPECT_EQ(a.state_digest, gui::state_digest(s));
}

TEST(Render, CheckedAndUncheckedDiffer) {
    const auto s = gui::new_session(full_db(), "R2", {});
    const auto t = click(s, "restaurant.finding.area.north");
    const BBox box = element(s, "restaurant.finding.area.north").bbox;
    const auto a = render::rasterize(layout::current_layout(s));
    const auto b = render::rasterize(layout::current_layout(t));
    EXPECT_NE(block_sum(a, box), block_sum(b, box));
    const BBox other = element(s, "restaurant.finding.area.south").bbox;
    EXPECT_EQ(block_sum(a, other), block_sum(b, other));
}

TEST(RenderText, DumpIsLayoutTextsInOrder) {
    for (const auto& s : {gui::new_session(full_db(), "R3", {}), searched(), click(searched(), "restaurant.results.row.0")}) {
        const auto lay = layout::current_layout(s);
        const auto snap = render::snapshot(s, lay, false);
        EXPECT_FALSE(snap.image);
        std::vector<std::string> expected;
        for (const auto& e : lay.elements) {
            if (!e.text.empty()) expected.push_back(e.text);
        }
        std::vector<std::string> got;
        for (const auto& l : snap.text_dump) got.push_back(l.text);
        EXPECT_EQ(got, expected);
        std::string joined;
        for (const auto& line : got) joined += line + "\n";
        EXPECT_EQ(render::serialize_text_dump(snap), joined);
    }
}

TEST(RenderText, FreshStateStartsWithHeader) {
    const auto s = gui::new_session(full_db(), "R4", {});
    const auto snap = render::snapshot(s, layout::current_layout(s), false);
    ASSERT_FALSE(snap.text_dump.empty());
    EXPECT_EQ(snap.text_dump.front().text, element(s, "header.title").text);
    for (const auto& l : snap.text_dump) EXPECT_EQ(l.text.find("matches"), std::string::npos);
}

TEST(RenderText, ResultValuesAppearOnce) {
    const auto s = searched();
    const auto snap = render::snapshot(s, layout::current_layout(s), false);
    for (const auto& rec : s.panel(Domain::restaurant).results) {
        int n = 0;
        for (const auto& l : snap.text_dump) n += l.text == rec.display_key();
        EXPECT_EQ(n, 1) << rec.display_key();
    }
}

TEST(RenderText, BookedStateShowsReference) {
    auto s = click(searched(), "restaurant.results.row.1");
    s.turn_index = 7;
    s = type(s, "restaurant.booking.people", "3");
    s = type(s, "restaurant.booking.day", "friday");
    s = type(s, "restaurant.booking.time", "18:00");
    s = click(s, "restaurant.booking.book");
    const auto dump = render::serialize_text_dump(render::snapshot(s, layout::current_layout(s), false));
    EXPECT_NE(dump.find(kb::generate_booking_reference("R1", Domain::restaurant, 7)), std::string::npos);
}

TEST(RenderFont, NonPrintableFallsBack) {
    for (int r = 0; r < 16; ++r) EXPECT_EQ(render::glyph_row('\x01', r), render::glyph_row('?', r));
    int lit = 0;
    for (int r = 0; r < 16; ++r) lit += render::glyph_row('A', r) != 0;
    EXPECT_GT(lit, 4);
    for (int r = 0; r < 16; ++r) EXPECT_EQ(render::glyph_row(' ', r), 0);
}
