#include "support.hpp"

#include "mmwoz/hash.hpp"

using namespace mmwoz;
using mmwoz::testing::click;
using mmwoz::testing::element;
using mmwoz::testing::full_db;
using mmwoz::testing::sample_db;
using mmwoz::testing::type;

namespace {

gui::GuiState indian_centre_search() {
    auto s = gui::new_session(full_db(), "MUL0001", {});
    s = type(s, "restaurant.finding.food", "indian");
    s = click(s, "restaurant.finding.pricerange.expensive");
    s = click(s, "restaurant.finding.area.centre");
    return click(s, "restaurant.finding.search");
}

}  // namespace

TEST(GuiSession, FreshStateIsEmpty) {
    const auto a = gui::new_session(sample_db(), "d1", {});
    const auto b = gui::new_session(sample_db(), "d1", {});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.active_domain, Domain::restaurant);
    for (Domain d : kAllDomains) {
        EXPECT_TRUE(a.panel(d).results.empty());
        EXPECT_FALSE(a.panel(d).selected);
    }
    const auto inv = gui::element_inventory(a, layout::current_layout(a));
    int menu = 0;
    bool header = false, search = false;
    for (const auto& it : inv) {
        if (it.element_id.starts_with("menu.")) ++menu;
        header |= it.element_id.starts_with("header.");
        search |= it.element_id == "restaurant.finding.search";
    }
    EXPECT_EQ(menu, 5);
    EXPECT_TRUE(header);
    EXPECT_TRUE(search);
}

TEST(GuiApply, MenuSwitchesDomainAndPanelsPersist) {
    auto s = gui::new_session(sample_db(), "d", {});
    s = click(s, "restaurant.finding.area.centre");
    s = click(s, "menu.hotel");
    EXPECT_EQ(s.active_domain, Domain::hotel);
    s = click(s, "menu.restaurant");
    EXPECT_EQ(s.panel(Domain::restaurant).checked.at("area"), std::set<std::string>{"centre"});
}

TEST(GuiApply, MissLeavesStateUnchanged) {
    const auto s = gui::new_session(sample_db(), "d", {});
    const auto before = s;
    EXPECT_THROW(gui::apply_operation(s, OperationInstruction::click({0, 0, 1, 1})), NoTargetError);
    EXPECT_EQ(s, before);
    OperationInstruction bad = OperationInstruction::click(element(s, "menu.hotel").bbox);
    bad.value = "x";
    EXPECT_THROW(gui::apply_operation(s, bad), ValueOnClickError);
    EXPECT_THROW(gui::apply_operation(s, OperationInstruction::input(element(s, "restaurant.finding.food").bbox, "")),
                 MissingValueError);
    EXPECT_THROW(gui::apply_operation(s, OperationInstruction::input(element(s, "menu.hotel").bbox, "x")),
                 NoTargetError);
}

TEST(GuiApply, SearchMatchesQuery) {
    const auto s = indian_centre_search();
    const auto& panel = s.panel(Domain::restaurant);
    const auto constraints = gui::finding_constraints(s, Domain::restaurant);
    EXPECT_EQ(panel.results, kb::query(*full_db(), Domain::restaurant, constraints));
    EXPECT_EQ(panel.total_matches, 6u);

    int rows = 0;
    for (const auto& it : gui::element_inventory(s, layout::current_layout(s))) {
        if (it.element_id.starts_with("restaurant.results.row.")) ++rows;
    }
    EXPECT_EQ(rows, 6);
}

TEST(GuiApply, DisplayCapAndCount) {
    auto s = gui::new_session(full_db(), "d", {});
    s = click(s, "restaurant.finding.search");
    const auto& panel = s.panel(Domain::restaurant);
    EXPECT_EQ(panel.total_matches, 110u);
    EXPECT_EQ(panel.results.size(), gui::kResultDisplayCap);
    EXPECT_EQ(element(s, "restaurant.results.count").text, "110 matches");
}

TEST(GuiApply, CheckboxToggleTwiceRestores) {
    const auto s = gui::new_session(sample_db(), "d", {});
    const auto once = click(s, "restaurant.finding.area.north");
    EXPECT_NE(once.panel(Domain::restaurant).checked, s.panel(Domain::restaurant).checked);
    const auto twice = click(once, "restaurant.finding.area.north");
    EXPECT_EQ(twice.panel(Domain::restaurant).checked.count("area") ? twice.panel(Domain::restaurant).checked.at("area")
                                                                    : std::set<std::string>{},
              std::set<std::string>{});
}

TEST(GuiApply, BookingProducesReference) {
    auto s = indian_centre_search();
    s.turn_index = 3;
    s = click(s, "restaurant.results.row.4");
    ASSERT_TRUE(s.panel(Domain::restaurant).selected);
    EXPECT_EQ(s.panel(Domain::restaurant).selected->display_key(), "saffron brasserie");
    s = type(s, "restaurant.booking.people", "6");
    s = type(s, "restaurant.booking.day", "saturday");

    const auto before = s;
    EXPECT_THROW(click(s, "restaurant.booking.book"), BookingIncompleteError);
    EXPECT_EQ(s, before);

    s = type(s, "restaurant.booking.time", "19:30");
    s = click(s, "restaurant.booking.book");
    const auto& outcome = s.panel(Domain::restaurant).outcome;
    ASSERT_TRUE(outcome);
    const auto* ref = std::get_if<gui::BookingReference>(&*outcome);
    ASSERT_NE(ref, nullptr);
    EXPECT_EQ(ref->reference, kb::generate_booking_reference("MUL0001", Domain::restaurant, 3));
}

TEST(GuiApply, TaxiSearchSynthesizesResult) {
    auto s = gui::new_session(full_db(), "T1", {});
    s = click(s, "menu.taxi");
    s = type(s, "taxi.finding.departure", "a");
    s = click(s, "taxi.finding.search");
    EXPECT_FALSE(s.panel(Domain::taxi).outcome);
    EXPECT_FALSE(s.panel(Domain::taxi).message.empty());
    s = type(s, "taxi.finding.destination", "b");
    s = click(s, "taxi.finding.search");
    ASSERT_TRUE(s.panel(Domain::taxi).outcome);
    const auto& t = std::get<kb::TaxiResult>(*s.panel(Domain::taxi).outcome);
    EXPECT_EQ(t.car_type, "blue toyota");
}

TEST(GuiApply, PureFunction) {
    const auto s = indian_centre_search();
    const auto op = OperationInstruction::click(element(s, "restaurant.results.row.2").bbox);
    EXPECT_EQ(gui::apply_operation(s, op), gui::apply_operation(s, op));
}

TEST(GuiHitTest, CentresRoundTrip) {
    for (const auto& s : {gui::new_session(full_db(), "d", {}), indian_centre_search(), click(indian_centre_search(), "restaurant.results.row.0")}) {
        const auto lay = layout::current_layout(s);
        for (const Element* e : lay.interactive()) {
            EXPECT_EQ(gui::hit_test(lay, e->bbox.center()), e->id);
        }
    }
}

TEST(GuiHitTest, GridScanOracle) {
    const auto s = click(indian_centre_search(), "restaurant.results.row.4");
    const auto lay = layout::current_layout(s);
    std::size_t hits = 0;
    for (int y = 0; y < lay.height; y += 8) {
        for (int x = 0; x < lay.width; x += 8) {
            const auto hit = gui::hit_test(lay, {x, y});
            std::vector<std::string> containing;
            for (const auto& e : lay.elements) {
                if (e.kind == ElementKind::interactive && e.bbox.contains({x, y})) containing.push_back(e.id);
            }
            ASSERT_LE(containing.size(), 1u);
            if (hit) {
                ++hits;
                ASSERT_EQ(containing.size(), 1u);
                EXPECT_EQ(*hit, containing[0]);
            } else {
                EXPECT_TRUE(containing.empty());
            }
        }
    }
    EXPECT_GT(hits, 0u);
    EXPECT_FALSE(gui::hit_test(lay, {420, 200}));
    EXPECT_EQ(gui::hit_test(lay, element(s, "restaurant.finding.search").bbox.center()), "restaurant.finding.search");
}

TEST(GuiInventory, KindsPartitionIds) {
    const auto s = click(indian_centre_search(), "restaurant.results.row.1");
    std::set<std::string> interactive, passive;
    for (const auto& it : gui::element_inventory(s, layout::current_layout(s))) {
        (it.kind == ElementKind::interactive ? interactive : passive).insert(it.element_id);
    }
    for (const auto& id : interactive) EXPECT_FALSE(passive.contains(id));
    EXPECT_TRUE(interactive.contains("restaurant.booking.book"));
}

TEST(GuiDigest, ReflectsObservableChanges) {
    const auto a = gui::new_session(sample_db(), "d", {});
    const auto b = click(a, "menu.hotel");
    EXPECT_NE(gui::state_digest(a), gui::state_digest(b));
    EXPECT_EQ(gui::state_digest(a), gui::state_digest(gui::new_session(sample_db(), "d", {})));
}
