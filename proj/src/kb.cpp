#include "mmwoz/kb.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/schema.hpp"
#include "mmwoz/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace mmwoz::kb {
namespace {

using nlohmann::json;

// MultiWOZ taxi_db.json values, used when the file is absent.
const std::vector<std::string> kDefaultTaxiColors{"black", "white", "red", "yellow", "blue", "grey"};
const std::vector<std::string> kDefaultTaxiTypes{"toyota", "skoda", "bmw",   "honda",      "ford",
                                                 "audi",   "lexus", "volvo", "volkswagen", "tesla"};

const std::string kEmpty;

json read_json_file(const std::filesystem::path& path, const std::string& domain) {
    std::ifstream in(path);
    if (!in) throw LoadError(domain, "missing database file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw LoadError(domain, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::optional<std::string> scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) return v.dump();
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    return std::nullopt;
}

EntityRecord parse_record(Domain d, const json& row, std::size_t index) {
    const std::string domain_name(to_string(d));
    if (!row.is_object()) throw LoadError(domain_name, "record is not an object", index);
    EntityRecord rec;
    rec.domain = d;
    for (const auto& [key, value] : row.items()) {
        auto s = scalar_to_string(value);
        if (!s) continue;  // location arrays, nested price tables
        std::string slot = key == "trainID" ? "id" : key;
        rec.attributes[slot] = text::normalize_value(*s);
    }
    if (auto it = rec.attributes.find("id"); it != rec.attributes.end()) rec.id = it->second;
    const auto key = schema::domain_schema(d).display_key;
    if (rec.attribute(std::string(key)).empty()) {
        throw LoadError(domain_name, "record has no " + std::string(key), index);
    }
    return rec;
}

bool matches(const EntityRecord& rec, const Constraint& c) {
    auto it = rec.attributes.find(c.slot);
    if (it == rec.attributes.end()) return false;
    if (c.mode == ConstraintMode::exact) return it->second == text::normalize_value(c.value);
    const std::string have = text::normalize_time(it->second);
    if (have.empty()) return false;
    const std::string want = text::normalize_time(c.value);
    return c.mode == ConstraintMode::time_at_or_after ? have >= want : have <= want;
}

}  // namespace

const std::string& EntityRecord::display_key() const {
    const auto key = schema::domain_schema(domain).display_key;
    auto it = attributes.find(std::string(key));
    return it == attributes.end() ? kEmpty : it->second;
}

std::string EntityRecord::attribute(const std::string& slot) const {
    auto it = attributes.find(slot);
    return it == attributes.end() ? std::string() : it->second;
}

Constraint make_constraint(std::string slot, std::string value) {
    ConstraintMode mode = ConstraintMode::exact;
    if (slot == "leaveAt") mode = ConstraintMode::time_at_or_after;
    if (slot == "arriveBy") mode = ConstraintMode::time_at_or_before;
    return {std::move(slot), std::move(value), mode};
}

Database::Database(std::map<Domain, std::vector<EntityRecord>> records, std::vector<std::string> taxi_colors,
                   std::vector<std::string> taxi_types)
    : records_(std::move(records)), taxi_colors_(std::move(taxi_colors)), taxi_types_(std::move(taxi_types)) {
    for (const auto& [d, rows] : records_) {
        std::set<std::string> names;
        for (const auto& r : rows) {
            for (const auto& [k, v] : r.attributes) names.insert(k);
        }
        slots_[d] = {names.begin(), names.end()};
    }
}

std::span<const EntityRecord> Database::records(Domain d) const {
    auto it = records_.find(d);
    if (it == records_.end()) return {};
    return it->second;
}

std::size_t Database::size() const {
    std::size_t n = 0;
    for (const auto& [d, rows] : records_) n += rows.size();
    return n;
}

std::map<Domain, std::size_t> Database::counts() const {
    std::map<Domain, std::size_t> out;
    for (const auto& [d, rows] : records_) out[d] = rows.size();
    return out;
}

const std::vector<std::string>& Database::slots(Domain d) const {
    static const std::vector<std::string> kNone;
    auto it = slots_.find(d);
    return it == slots_.end() ? kNone : it->second;
}

std::vector<std::string> Database::distinct_values(Domain d, const std::string& slot) const {
    std::set<std::string> values;
    for (const auto& r : records(d)) {
        auto v = r.attribute(slot);
        if (!v.empty()) values.insert(v);
    }
    return {values.begin(), values.end()};
}

DatabasePtr load_database(const std::filesystem::path& dir) {
    std::map<Domain, std::vector<EntityRecord>> tables;
    for (Domain d : kAllDomains) {
        if (!schema::domain_schema(d).has_database) continue;
        const std::string name(to_string(d));
        const json doc = read_json_file(dir / (name + "_db.json"), name);
        if (!doc.is_array()) throw LoadError(name, name + "_db.json is not a JSON array");
        auto& rows = tables[d];
        rows.reserve(doc.size());
        std::set<std::string> keys;
        for (std::size_t i = 0; i < doc.size(); ++i) {
            rows.push_back(parse_record(d, doc[i], i));
            // Train ids repeat across days in the MultiWOZ data, so uniqueness is only
            // enforced where the display key is a name.
            if (d != Domain::train && !keys.insert(rows.back().display_key()).second) {
                throw LoadError(name, "duplicate entity '" + rows.back().display_key() + "'", i);
            }
        }
    }

    std::vector<std::string> colors = kDefaultTaxiColors;
    std::vector<std::string> types = kDefaultTaxiTypes;
    if (std::filesystem::exists(dir / "taxi_db.json")) {
        const json taxi = read_json_file(dir / "taxi_db.json", "taxi");
        if (taxi.contains("taxi_colors") && taxi["taxi_colors"].is_array() && !taxi["taxi_colors"].empty()) {
            colors = taxi["taxi_colors"].get<std::vector<std::string>>();
        }
        if (taxi.contains("taxi_types") && taxi["taxi_types"].is_array() && !taxi["taxi_types"].empty()) {
            types = taxi["taxi_types"].get<std::vector<std::string>>();
        }
    }
    return std::make_shared<const Database>(std::move(tables), std::move(colors), std::move(types));
}

std::vector<EntityRecord> query(const Database& db, Domain domain, std::span<const Constraint> constraints) {
    if (!schema::domain_schema(domain).has_database) {
        throw QueryError(std::string(to_string(domain)) + " has no database");
    }
    const auto& known = db.slots(domain);
    for (const auto& c : constraints) {
        const bool is_known = std::binary_search(known.begin(), known.end(), c.slot) ||
                              schema::is_finding_slot(domain, c.slot);
        if (!is_known) {
            throw QueryError("unknown slot '" + c.slot + "' for " + std::string(to_string(domain)));
        }
        if (c.mode != ConstraintMode::exact) {
            if (!schema::is_time_slot(c.slot)) throw QueryError("time constraint on non-time slot " + c.slot);
            if (text::normalize_time(c.value).empty()) {
                throw QueryError("time value '" + c.value + "' is not HH:MM");
            }
        }
    }

    std::vector<EntityRecord> out;
    for (const auto& rec : db.records(domain)) {
        if (std::all_of(constraints.begin(), constraints.end(), [&](const Constraint& c) { return matches(rec, c); })) {
            out.push_back(rec);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const EntityRecord& a, const EntityRecord& b) {
        if (a.display_key() != b.display_key()) return a.display_key() < b.display_key();
        if (a.id != b.id) return a.id < b.id;
        return a.attribute("address") < b.attribute("address");
    });
    return out;
}

std::string generate_booking_reference(std::string_view dialogue_id, Domain domain, int turn_index) {
    StableHasher h;
    h.field("booking").field(dialogue_id).field(to_string(domain)).field(turn_index);
    std::string code = to_base36(h.digest());
    if (code.size() < 13) code.insert(0, 13 - code.size(), '0');
    return code.substr(code.size() - 8);
}

TaxiResult generate_taxi(const Database& db, std::string_view dialogue_id, std::span<const Constraint> constraints) {
    std::map<std::string, std::string> fields;
    for (const auto& c : constraints) fields[c.slot] = text::normalize_value(c.value);
    if (fields["departure"].empty() || fields["destination"].empty()) {
        throw QueryError("taxi needs both departure and destination");
    }
    StableHasher h;
    h.field("taxi").field(dialogue_id);
    for (const auto& [slot, value] : fields) {
        if (!value.empty()) h.field(slot).field(value);
    }
    SplitMix64 rng(h.digest());
    const auto& colors = db.taxi_colors();
    const auto& types = db.taxi_types();
    TaxiResult result;
    const auto& color = colors[rng.next() % colors.size()];
    const auto& type = types[rng.next() % types.size()];
    result.car_type = color + " " + type;
    result.phone = "0";
    for (int i = 0; i < 10; ++i) result.phone.push_back(static_cast<char>('0' + rng.next() % 10));
    return result;
}

}  // namespace mmwoz::kb
