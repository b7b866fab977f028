#pragma once

#include "mmwoz/types.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mmwoz::kb {

/// One database row. Attribute values are lowercase-normalized at load time.
struct EntityRecord {
    Domain domain = Domain::restaurant;
    /// Train id, or the source "id" field for the other domains.
    std::string id;
    std::map<std::string, std::string> attributes;

    /// name for restaurant/hotel/attraction, id for train.
    [[nodiscard]] const std::string& display_key() const;
    [[nodiscard]] std::string attribute(const std::string& slot) const;

    bool operator==(const EntityRecord&) const = default;
};

enum class ConstraintMode : std::uint8_t { exact, time_at_or_after, time_at_or_before };

struct Constraint {
    std::string slot;
    std::string value;
    ConstraintMode mode = ConstraintMode::exact;

    bool operator==(const Constraint&) const = default;
};

/// Default constraint mode for a slot: leaveAt is a lower bound, arriveBy an upper bound.
Constraint make_constraint(std::string slot, std::string value);

struct TaxiResult {
    std::string car_type;
    std::string phone;

    bool operator==(const TaxiResult&) const = default;
};

/// Immutable, shareable handle over the per-domain tables.
class Database {
public:
    Database(std::map<Domain, std::vector<EntityRecord>> records, std::vector<std::string> taxi_colors,
             std::vector<std::string> taxi_types);

    [[nodiscard]] std::span<const EntityRecord> records(Domain d) const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::map<Domain, std::size_t> counts() const;
    /// Attribute names that occur in at least one record of `d`.
    [[nodiscard]] const std::vector<std::string>& slots(Domain d) const;
    /// Sorted distinct values of one attribute.
    [[nodiscard]] std::vector<std::string> distinct_values(Domain d, const std::string& slot) const;
    [[nodiscard]] const std::vector<std::string>& taxi_colors() const { return taxi_colors_; }
    [[nodiscard]] const std::vector<std::string>& taxi_types() const { return taxi_types_; }

private:
    std::map<Domain, std::vector<EntityRecord>> records_;
    std::map<Domain, std::vector<std::string>> slots_;
    std::vector<std::string> taxi_colors_;
    std::vector<std::string> taxi_types_;
};

using DatabasePtr = std::shared_ptr<const Database>;

/// Reads restaurant_db.json, hotel_db.json, attraction_db.json and train_db.json
/// (MultiWOZ layout). taxi_db.json is optional and only supplies car colours/types.
/// Throws LoadError naming the domain, and the record index for malformed rows.
DatabasePtr load_database(const std::filesystem::path& dir);

/// All records of `domain` satisfying every constraint, ordered by display key,
/// then id, then address. Throws QueryError for taxi, unknown slots and
/// malformed time values.
std::vector<EntityRecord> query(const Database& db, Domain domain, std::span<const Constraint> constraints);

/// Eight uppercase base-36 characters derived from a stable hash of the inputs.
std::string generate_booking_reference(std::string_view dialogue_id, Domain domain, int turn_index);

/// Synthesized taxi booking. Requires departure and destination constraints.
TaxiResult generate_taxi(const Database& db, std::string_view dialogue_id, std::span<const Constraint> constraints);

}  // namespace mmwoz::kb
