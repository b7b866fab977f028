#include "support.hpp"

#include "mmwoz/annotation.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/text.hpp"

#include <fstream>
#include <regex>

using namespace mmwoz;
using mmwoz::testing::TempDir;
using mmwoz::testing::full_db;
using mmwoz::testing::sample_db;
using mmwoz::testing::source_dir;

namespace {

std::size_t raw_record_count(const std::filesystem::path& dir) {
    std::size_t n = 0;
    for (const char* name : {"restaurant", "hotel", "attraction", "train"}) {
        n += read_json_file(dir / (std::string(name) + "_db.json")).size();
    }
    return n;
}

std::string pad_time(const std::string& t) { return t.size() == 4 ? "0" + t : t; }

// Brute force over the raw JSON, independent of the kb matcher.
std::vector<std::string> scan(const std::filesystem::path& file, const std::string& key_field,
                              const std::vector<kb::Constraint>& cs) {
    std::vector<std::string> keys;
    for (const auto& row : read_json_file(file)) {
        bool ok = true;
        for (const auto& c : cs) {
            const std::string field = c.slot == "id" ? "trainID" : c.slot;
            if (!row.contains(field) || !row[field].is_string()) {
                ok = false;
                break;
            }
            std::string have = row[field].get<std::string>();
            std::transform(have.begin(), have.end(), have.begin(), ::tolower);
            if (c.mode == kb::ConstraintMode::exact) ok = have == c.value;
            else if (c.mode == kb::ConstraintMode::time_at_or_after) ok = pad_time(have) >= pad_time(c.value);
            else ok = pad_time(have) <= pad_time(c.value);
            if (!ok) break;
        }
        if (ok) {
            std::string k = row[key_field].get<std::string>();
            std::transform(k.begin(), k.end(), k.begin(), ::tolower);
            keys.push_back(k);
        }
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::vector<std::string> keys_of(const std::vector<kb::EntityRecord>& rows) {
    std::vector<std::string> out;
    for (const auto& r : rows) out.push_back(r.display_key());
    return out;
}

}  // namespace

TEST(KbLoad, SampleDirectoryHasTwelveRecords) {
    const auto db = sample_db();
    EXPECT_EQ(raw_record_count(source_dir() / "data/sample_db"), 12u);
    EXPECT_EQ(db->size(), 12u);
}

TEST(KbLoad, FullDatabaseCounts) {
    const auto counts = full_db()->counts();
    EXPECT_EQ(counts.at(Domain::restaurant), 110u);
    EXPECT_EQ(counts.at(Domain::restaurant), read_json_file(source_dir() / "data/db/restaurant_db.json").size());
    EXPECT_EQ(counts.at(Domain::hotel), 33u);
    EXPECT_EQ(counts.at(Domain::attraction), 79u);
    EXPECT_EQ(counts.at(Domain::train), 2828u);
}

TEST(KbLoad, EmptyDirectoryNamesRestaurant) {
    TempDir dir("kb_empty");
    try {
        kb::load_database(dir.path());
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_EQ(e.domain(), "restaurant");
    }
}

TEST(KbLoad, MalformedRecordCarriesIndex) {
    TempDir dir("kb_bad");
    for (const char* n : {"restaurant", "hotel", "attraction", "train"}) {
        std::filesystem::copy_file(source_dir() / "data/sample_db" / (std::string(n) + "_db.json"),
                                   dir.path() / (std::string(n) + "_db.json"));
    }
    Json hotels = read_json_file(dir.path() / "hotel_db.json");
    hotels[1].erase("name");
    write_json_file(dir.path() / "hotel_db.json", hotels);
    try {
        kb::load_database(dir.path());
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_EQ(e.domain(), "hotel");
        EXPECT_EQ(e.record(), 1u);
    }

    std::ofstream(dir.path() / "hotel_db.json") << "[{";
    EXPECT_THROW(kb::load_database(dir.path()), LoadError);
}

TEST(KbLoad, ValuesAreLowercase) {
    for (Domain d : {Domain::restaurant, Domain::hotel, Domain::attraction, Domain::train}) {
        for (const auto& r : full_db()->records(d)) {
            EXPECT_FALSE(r.display_key().empty());
            for (const auto& [k, v] : r.attributes) {
                EXPECT_EQ(v, text::normalize_value(v)) << k;
            }
        }
    }
}

TEST(KbQuery, ExpensiveIndianCentreHasSix) {
    const std::vector<kb::Constraint> cs{kb::make_constraint("food", "indian"),
                                         kb::make_constraint("pricerange", "expensive"),
                                         kb::make_constraint("area", "centre")};
    const auto rows = kb::query(*full_db(), Domain::restaurant, cs);
    ASSERT_EQ(rows.size(), 6u);
    const auto keys = keys_of(rows);
    EXPECT_EQ(keys, scan(source_dir() / "data/db/restaurant_db.json", "name", cs));
    EXPECT_NE(std::find(keys.begin(), keys.end(), "saffron brasserie"), keys.end());
}

TEST(KbQuery, EmptyConstraintsReturnEverything) {
    EXPECT_EQ(kb::query(*full_db(), Domain::hotel, {}).size(), 33u);
}

TEST(KbQuery, TrainLeaveAfterMatchesScan) {
    const std::vector<kb::Constraint> cs{kb::make_constraint("leaveAt", "09:00")};
    EXPECT_EQ(cs[0].mode, kb::ConstraintMode::time_at_or_after);
    const auto rows = kb::query(*sample_db(), Domain::train, cs);
    EXPECT_EQ(keys_of(rows), scan(source_dir() / "data/sample_db/train_db.json", "trainID", cs));
    const auto all = kb::query(*full_db(), Domain::train, cs);
    EXPECT_EQ(keys_of(all), scan(source_dir() / "data/db/train_db.json", "trainID", cs));
}

TEST(KbQuery, Errors) {
    const std::vector<kb::Constraint> bad_slot{kb::make_constraint("colour", "red")};
    EXPECT_THROW(kb::query(*full_db(), Domain::restaurant, bad_slot), QueryError);
    const std::vector<kb::Constraint> bad_time{kb::make_constraint("leaveAt", "after 9")};
    EXPECT_THROW(kb::query(*full_db(), Domain::train, bad_time), QueryError);
    EXPECT_THROW(kb::query(*full_db(), Domain::taxi, {}), QueryError);
}

// Random constraint sets against the brute-force scan, plus anti-monotonicity.
TEST(KbQuery, RandomConstraintsMatchScanAndShrink) {
    SplitMix64 rng(2024);
    struct Spec {
        Domain d;
        const char* file;
        const char* key;
        std::vector<std::string> slots;
    };
    const std::vector<Spec> specs{
        {Domain::restaurant, "restaurant_db.json", "name", {"area", "pricerange", "food"}},
        {Domain::hotel, "hotel_db.json", "name", {"area", "pricerange", "stars", "parking", "internet", "type"}},
        {Domain::attraction, "attraction_db.json", "name", {"area", "type"}},
        {Domain::train, "train_db.json", "trainID", {"departure", "destination", "day", "leaveAt", "arriveBy"}},
    };
    const auto db = full_db();
    for (int iter = 0; iter < 300; ++iter) {
        const auto& spec = specs[static_cast<std::size_t>(rng.uniform(0, 3))];
        std::vector<kb::Constraint> cs;
        const int n = rng.uniform(1, 3);
        for (int i = 0; i < n; ++i) {
            const auto& slot = spec.slots[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(spec.slots.size()) - 1))];
            const auto values = db->distinct_values(spec.d, slot);
            if (values.empty()) continue;
            cs.push_back(kb::make_constraint(slot, values[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(values.size()) - 1))]));
        }
        const auto rows = kb::query(*db, spec.d, cs);
        EXPECT_EQ(keys_of(rows), scan(source_dir() / "data/db" / spec.file, spec.key, cs));
        if (!cs.empty()) {
            std::vector<kb::Constraint> fewer(cs.begin(), cs.end() - 1);
            EXPECT_LE(rows.size(), kb::query(*db, spec.d, fewer).size());
        }
        EXPECT_EQ(keys_of(rows), keys_of(kb::query(*db, spec.d, cs)));
    }
}

// Goldens from an independent Python implementation of the same hash recipe
// (tools/make_sample_corpus.py).
TEST(KbGenerate, BookingReferenceGoldens) {
    EXPECT_EQ(kb::generate_booking_reference("MUL0001", Domain::restaurant, 3), "2TKW47CN");
    EXPECT_EQ(kb::generate_booking_reference("MUL0001", Domain::restaurant, 5), "L3305RV3");
    EXPECT_EQ(kb::generate_booking_reference("SNG0073", Domain::hotel, 1), "092J74PG");
    const std::regex format("^[0-9A-Z]{8}$");
    for (int t = 0; t < 50; ++t) {
        EXPECT_TRUE(std::regex_match(kb::generate_booking_reference("X", Domain::train, t), format));
    }
}

TEST(KbGenerate, TaxiGoldens) {
    const std::vector<kb::Constraint> cs{kb::make_constraint("departure", "pizza hut city centre"),
                                         kb::make_constraint("destination", "broughton house gallery"),
                                         kb::make_constraint("leaveAt", "14:30")};
    const auto t = kb::generate_taxi(*full_db(), "SNG0501", cs);
    EXPECT_EQ(t.car_type, "blue ford");
    EXPECT_EQ(t.phone, "00586444527");
    const std::vector<kb::Constraint> ab{kb::make_constraint("departure", "a"), kb::make_constraint("destination", "b")};
    const auto u = kb::generate_taxi(*full_db(), "T1", ab);
    EXPECT_EQ(u.car_type, "blue toyota");
    EXPECT_EQ(u.phone, "06896492311");
    EXPECT_TRUE(std::regex_match(u.phone, std::regex("^[0-9]{11}$")));
    EXPECT_EQ(kb::generate_taxi(*full_db(), "T1", ab), u);

    const std::vector<kb::Constraint> half{kb::make_constraint("departure", "a")};
    EXPECT_THROW(kb::generate_taxi(*full_db(), "T1", half), QueryError);
}
