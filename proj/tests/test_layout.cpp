#include "support.hpp"

#include "mmwoz/hash.hpp"

#include <regex>

using namespace mmwoz;
using mmwoz::testing::click;
using mmwoz::testing::full_db;
using mmwoz::testing::type;

namespace {

// A handful of states covering every domain panel, selection and booking outcomes.
std::vector<gui::GuiState> sample_states(const LayoutConfig& config = {}) {
    std::vector<gui::GuiState> out;
    auto s = gui::new_session(full_db(), "L1", config);
    out.push_back(s);
    s = type(s, "restaurant.finding.food", "indian");
    s = click(s, "restaurant.finding.area.centre");
    s = click(s, "restaurant.finding.search");
    out.push_back(s);
    s = click(s, "restaurant.results.row.2");
    s = type(s, "restaurant.booking.people", "2");
    s = type(s, "restaurant.booking.day", "monday");
    s = type(s, "restaurant.booking.time", "12:00");
    s = click(s, "restaurant.booking.book");
    out.push_back(s);
    s = click(s, "menu.hotel");
    s = click(s, "hotel.finding.parking.yes");
    s = click(s, "hotel.finding.search");
    s = click(s, "hotel.results.row.0");
    out.push_back(s);
    s = click(s, "menu.attraction");
    s = click(s, "attraction.finding.search");
    out.push_back(s);
    s = click(s, "menu.train");
    s = type(s, "train.finding.departure", "cambridge");
    s = type(s, "train.finding.leaveAt", "10:00");
    s = click(s, "train.finding.search");
    s = click(s, "train.results.row.3");
    out.push_back(s);
    s = click(s, "menu.taxi");
    s = type(s, "taxi.finding.departure", "x");
    s = type(s, "taxi.finding.destination", "y");
    s = click(s, "taxi.finding.search");
    out.push_back(s);
    return out;
}

void expect_invariants(const layout::Layout& lay) {
    for (const auto& e : lay.elements) {
        EXPECT_GE(e.bbox.x1, 0) << e.id;
        EXPECT_GE(e.bbox.y1, 0) << e.id;
        EXPECT_LE(e.bbox.x2, lay.width) << e.id;
        EXPECT_LE(e.bbox.y2, lay.height) << e.id;
        EXPECT_FALSE(e.bbox.empty()) << e.id;
    }
    const auto inter = lay.interactive();
    for (std::size_t i = 0; i < inter.size(); ++i) {
        for (std::size_t j = i + 1; j < inter.size(); ++j) {
            EXPECT_FALSE(inter[i]->bbox.intersects(inter[j]->bbox)) << inter[i]->id << " vs " << inter[j]->id;
        }
    }
    for (std::size_t i = 1; i < lay.elements.size(); ++i) {
        const auto& a = lay.elements[i - 1].bbox;
        const auto& b = lay.elements[i].bbox;
        EXPECT_TRUE(a.y1 < b.y1 || (a.y1 == b.y1 && a.x1 <= b.x1));
    }
}

std::multiset<std::tuple<std::string, ElementKind, std::string>> semantics(const layout::Layout& lay) {
    std::multiset<std::tuple<std::string, ElementKind, std::string>> out;
    for (const auto& e : lay.elements) out.emplace(e.id, e.kind, e.text);
    return out;
}

std::map<std::string, BBox> boxes(const layout::Layout& lay, ElementKind kind) {
    std::map<std::string, BBox> out;
    for (const auto& e : lay.elements) {
        if (e.kind == kind) out[e.id] = e.bbox;
    }
    return out;
}

}  // namespace

TEST(Layout, DeterministicAndWellFormed) {
    for (const auto& s : sample_states()) {
        const auto a = layout::compute_layout(s, s.config);
        EXPECT_EQ(a, layout::compute_layout(s, s.config));
        expect_invariants(a);
    }
}

TEST(Layout, ResultRowsStackDownwards) {
    const auto s = sample_states()[1];
    const auto lay = layout::compute_layout(s, s.config);
    std::vector<int> ys;
    for (const auto& e : lay.elements) {
        if (e.id.starts_with("restaurant.results.row.")) ys.push_back(e.bbox.y1);
    }
    ASSERT_EQ(ys.size(), s.panel(Domain::restaurant).results.size());
    for (std::size_t i = 1; i < ys.size(); ++i) EXPECT_LT(ys[i - 1], ys[i]);
}

TEST(Layout, BoxesQuoteLikeCoordinates) {
    const auto lay = layout::compute_layout(sample_states()[1], {});
    const std::regex shape(R"(^\(\d+, \d+, \d+, \d+\)$)");
    for (const auto& e : lay.elements) EXPECT_TRUE(std::regex_match(format_bbox(e.bbox), shape));
}

TEST(LayoutPerturb, InteractiveModeIsolation) {
    for (std::uint64_t seed : {7ULL, 8ULL, 12345ULL}) {
        LayoutConfig cfg{1280, 960, PerturbMode::interactive, seed};
        for (const auto& s : sample_states()) {
            const auto base = layout::compute_layout(s, cfg);
            const auto moved = layout::perturb(base, cfg);
            EXPECT_EQ(boxes(base, ElementKind::noninteractive), boxes(moved, ElementKind::noninteractive));
            EXPECT_EQ(semantics(base), semantics(moved));
            expect_invariants(moved);
            EXPECT_EQ(moved, layout::perturb(base, cfg));
        }
    }
}

TEST(LayoutPerturb, NoninteractiveModeIsolation) {
    LayoutConfig cfg{1280, 960, PerturbMode::noninteractive, 7};
    for (const auto& s : sample_states()) {
        const auto base = layout::compute_layout(s, cfg);
        const auto moved = layout::perturb(base, cfg);
        EXPECT_EQ(boxes(base, ElementKind::interactive), boxes(moved, ElementKind::interactive));
        EXPECT_EQ(semantics(base), semantics(moved));
        expect_invariants(moved);
    }
}

TEST(LayoutPerturb, BothModesMoveThingsAndKeepHitTest) {
    LayoutConfig cfg{1280, 960, PerturbMode::both, 99};
    for (const auto& s0 : sample_states(cfg)) {
        const auto base = layout::compute_layout(s0, cfg);
        const auto moved = layout::current_layout(s0);
        EXPECT_EQ(semantics(base), semantics(moved));
        expect_invariants(moved);
        for (const Element* e : moved.interactive()) EXPECT_EQ(gui::hit_test(moved, e->bbox.center()), e->id);
    }
    const auto s = sample_states(cfg)[1];
    EXPECT_NE(boxes(layout::compute_layout(s, cfg), ElementKind::interactive),
              boxes(layout::current_layout(s), ElementKind::interactive));
}

TEST(LayoutPerturb, SeedsDiffer) {
    const auto s = sample_states()[2];
    LayoutConfig a{1280, 960, PerturbMode::interactive, 1};
    LayoutConfig b{1280, 960, PerturbMode::interactive, 2};
    const auto base = layout::compute_layout(s, a);
    EXPECT_NE(layout::perturb(base, a), layout::perturb(base, b));
    LayoutConfig none{1280, 960, PerturbMode::none, 1};
    EXPECT_EQ(layout::perturb(base, none), base);
}

TEST(LayoutPerturb, RandomSeedsKeepInvariants) {
    SplitMix64 rng(77);
    const auto states = sample_states();
    for (int i = 0; i < 60; ++i) {
        const auto mode = static_cast<PerturbMode>(rng.uniform(1, 3));
        LayoutConfig cfg{1280, 960, mode, rng.next()};
        const auto& s = states[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(states.size()) - 1))];
        const auto base = layout::compute_layout(s, cfg);
        const auto moved = layout::perturb(base, cfg);
        expect_invariants(moved);
        EXPECT_EQ(semantics(base), semantics(moved));
    }
}
