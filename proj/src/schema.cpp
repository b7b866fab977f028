#include "mmwoz/schema.hpp"

#include "mmwoz/text.hpp"

#include <algorithm>

namespace mmwoz::schema {
namespace {

using namespace std::string_view_literals;

constexpr std::string_view kAreas[] = {"centre"sv, "east"sv, "north"sv, "south"sv, "west"sv};
constexpr std::string_view kPrices[] = {"cheap"sv, "moderate"sv, "expensive"sv};
constexpr std::string_view kYesNo[] = {"yes"sv, "no"sv};
constexpr std::string_view kStars[] = {"0"sv, "1"sv, "2"sv, "3"sv, "4"sv, "5"sv};
constexpr std::string_view kHotelTypes[] = {"hotel"sv, "guesthouse"sv};
constexpr std::string_view kAttractionTypes[] = {
    "architecture"sv, "boat"sv,   "cinema"sv,          "college"sv,   "concerthall"sv,  "entertainment"sv,
    "museum"sv,       "park"sv,   "mutliple sports"sv, "nightclub"sv, "swimmingpool"sv, "theatre"sv};
constexpr std::string_view kDays[] = {"monday"sv, "tuesday"sv,  "wednesday"sv, "thursday"sv,
                                      "friday"sv, "saturday"sv, "sunday"sv};

// Categorical, low-cardinality slots are checkboxes; everything else is typed.
const ControlRule kControlTable[] = {
    {std::nullopt, "area"sv, Control::checkbox, kAreas},
    {std::nullopt, "pricerange"sv, Control::checkbox, kPrices},
    {std::nullopt, "stars"sv, Control::checkbox, kStars},
    {std::nullopt, "parking"sv, Control::checkbox, kYesNo},
    {std::nullopt, "internet"sv, Control::checkbox, kYesNo},
    {Domain::hotel, "type"sv, Control::checkbox, kHotelTypes},
    {Domain::attraction, "type"sv, Control::checkbox, kAttractionTypes},
    {std::nullopt, "day"sv, Control::checkbox, kDays},
    {std::nullopt, "name"sv, Control::text, {}},
    {std::nullopt, "food"sv, Control::text, {}},
    {std::nullopt, "departure"sv, Control::text, {}},
    {std::nullopt, "destination"sv, Control::text, {}},
    {std::nullopt, "leaveAt"sv, Control::text, {}},
    {std::nullopt, "arriveBy"sv, Control::text, {}},
    {std::nullopt, "time"sv, Control::text, {}},
    {std::nullopt, "people"sv, Control::text, {}},
    {std::nullopt, "stay"sv, Control::text, {}},
    {Domain::train, "id"sv, Control::text, {}},
};

struct Alias {
    std::string_view from;
    std::string_view to;
};

// Spellings seen in dialogue annotations that differ from the database vocabulary.
constexpr Alias kAliases[] = {
    {"center"sv, "centre"sv},
    {"guest house"sv, "guesthouse"sv},
    {"guesthouses"sv, "guesthouse"sv},
    {"hotels"sv, "hotel"sv},
    {"swimming pool"sv, "swimmingpool"sv},
    {"pool"sv, "swimmingpool"sv},
    {"concert hall"sv, "concerthall"sv},
    {"concert"sv, "concerthall"sv},
    {"night club"sv, "nightclub"sv},
    {"multiple sports"sv, "mutliple sports"sv},
    {"sports"sv, "mutliple sports"sv},
    {"museums"sv, "museum"sv},
    {"colleges"sv, "college"sv},
    {"parks"sv, "park"sv},
    {"theater"sv, "theatre"sv},
    {"boats"sv, "boat"sv},
    {"moderately priced"sv, "moderate"sv},
    {"free"sv, "yes"sv},
};

constexpr std::string_view kRestaurantFinding[] = {"name"sv, "food"sv, "pricerange"sv, "area"sv};
constexpr std::string_view kHotelFinding[] = {"name"sv,  "type"sv,     "area"sv,    "pricerange"sv,
                                              "stars"sv, "parking"sv, "internet"sv};
constexpr std::string_view kAttractionFinding[] = {"name"sv, "type"sv, "area"sv};
// "id" never appears in dialogue states; the compiler types a mentioned train id
// there when the train is not among the displayed rows.
constexpr std::string_view kTrainFinding[] = {"departure"sv, "destination"sv, "day"sv,
                                              "leaveAt"sv,   "arriveBy"sv,    "id"sv};
constexpr std::string_view kTaxiFinding[] = {"departure"sv, "destination"sv, "leaveAt"sv, "arriveBy"sv};

constexpr std::string_view kRestaurantBooking[] = {"people"sv, "day"sv, "time"sv};
constexpr std::string_view kHotelBooking[] = {"people"sv, "day"sv, "stay"sv};
constexpr std::string_view kTrainBooking[] = {"people"sv};

constexpr std::string_view kRestaurantInfo[] = {"name"sv,    "food"sv,     "pricerange"sv, "area"sv,
                                                "address"sv, "postcode"sv, "phone"sv};
constexpr std::string_view kHotelInfo[] = {"name"sv,     "type"sv,    "stars"sv,   "pricerange"sv, "area"sv,
                                           "parking"sv,  "internet"sv, "address"sv, "postcode"sv,   "phone"sv};
constexpr std::string_view kAttractionInfo[] = {"name"sv,     "type"sv,  "area"sv,          "address"sv,
                                                "postcode"sv, "phone"sv, "entrance fee"sv, "openhours"sv};
constexpr std::string_view kTrainInfo[] = {"id"sv,       "departure"sv, "destination"sv, "day"sv,
                                           "leaveAt"sv,  "arriveBy"sv,  "duration"sv,    "price"sv};

const DomainSchema kSchemas[] = {
    {Domain::restaurant, kRestaurantFinding, kRestaurantBooking, kRestaurantInfo, "name"sv, true, true},
    {Domain::hotel, kHotelFinding, kHotelBooking, kHotelInfo, "name"sv, true, true},
    {Domain::attraction, kAttractionFinding, {}, kAttractionInfo, "name"sv, true, false},
    {Domain::train, kTrainFinding, kTrainBooking, kTrainInfo, "id"sv, true, true},
    {Domain::taxi, kTaxiFinding, {}, {}, ""sv, false, false},
};

const ControlRule* find_rule(Domain d, std::string_view slot) {
    const ControlRule* generic = nullptr;
    for (const auto& rule : kControlTable) {
        if (rule.slot != slot) continue;
        if (rule.domain == d) return &rule;
        if (!rule.domain) generic = &rule;
    }
    return generic;
}

bool contains(std::span<const std::string_view> list, std::string_view v) {
    return std::find(list.begin(), list.end(), v) != list.end();
}

}  // namespace

std::span<const ControlRule> control_table() { return kControlTable; }

const DomainSchema& domain_schema(Domain d) { return kSchemas[static_cast<std::size_t>(d)]; }

std::optional<Control> finding_control(Domain d, std::string_view slot) {
    if (!is_finding_slot(d, slot)) return std::nullopt;
    const ControlRule* rule = find_rule(d, slot);
    return rule ? rule->control : Control::text;
}

std::span<const std::string_view> fixed_options(Domain d, std::string_view slot) {
    const ControlRule* rule = find_rule(d, slot);
    if (!rule || rule->control != Control::checkbox) return {};
    return rule->options;
}

bool is_finding_slot(Domain d, std::string_view slot) { return contains(domain_schema(d).finding, slot); }
bool is_booking_slot(Domain d, std::string_view slot) { return contains(domain_schema(d).booking, slot); }
bool is_entity_slot(std::string_view slot) { return contains(kEntitySlots, slot); }
bool is_time_slot(std::string_view slot) { return slot == "leaveAt" || slot == "arriveBy"; }

std::string canonical_value(Domain d, std::string_view slot, std::string_view value) {
    std::string v = text::normalize_value(value);
    if (is_time_slot(slot) || slot == "time") {
        std::string t = text::normalize_time(v);
        return t.empty() ? v : t;
    }
    if (slot == "stars" && v.size() > 1 && v.find(" star") != std::string::npos) v = v.substr(0, v.find(' '));
    const bool categorical = finding_control(d, slot) == Control::checkbox || slot == "type";
    if (categorical) {
        for (const auto& a : kAliases) {
            if (v == a.from) return std::string(a.to);
        }
    }
    return v;
}

}  // namespace mmwoz::schema
