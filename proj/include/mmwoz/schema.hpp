#pragma once

#include "mmwoz/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmwoz::schema {

/// How a finding-subpanel slot is rendered and operated.
enum class Control : std::uint8_t { checkbox, text };

/// One row of the click-vs-input table. `options` is used only for checkboxes;
/// an empty list means "distinct values found in the loaded database".
struct ControlRule {
    std::optional<Domain> domain;  // nullopt = applies to every domain
    std::string_view slot;
    Control control;
    std::span<const std::string_view> options;
};

/// The single table that decides which slots are checkboxes and which are text
/// inputs. Domain-specific rows win over generic ones.
std::span<const ControlRule> control_table();

struct DomainSchema {
    Domain domain;
    /// Finding-subpanel slots, top to bottom.
    std::span<const std::string_view> finding;
    /// Booking-subpanel text fields, top to bottom. All are required by the book button.
    std::span<const std::string_view> booking;
    /// Attributes shown in the information subpanel for the selected entity.
    std::span<const std::string_view> info;
    /// Attribute used as the display key of a record ("name", or "id" for trains).
    std::string_view display_key;
    bool has_database;
    bool bookable;
};

const DomainSchema& domain_schema(Domain d);

/// Control for a finding slot of `d`; nullopt when the slot is not a finding slot.
std::optional<Control> finding_control(Domain d, std::string_view slot);
/// The fixed option list for a checkbox slot (may be empty: caller derives options from data).
std::span<const std::string_view> fixed_options(Domain d, std::string_view slot);

bool is_finding_slot(Domain d, std::string_view slot);
bool is_booking_slot(Domain d, std::string_view slot);

/// Slots that identify an entity when a system act mentions them.
inline constexpr std::array<std::string_view, 5> kEntitySlots{"name", "id", "phone", "postcode", "address"};
bool is_entity_slot(std::string_view slot);

/// Slot used by the time-window constraint modes.
bool is_time_slot(std::string_view slot);

/// Maps an annotated value onto the GUI/database vocabulary: lowercase, trimmed,
/// times zero-padded, and known spelling variants of categorical values folded.
std::string canonical_value(Domain d, std::string_view slot, std::string_view value);

}  // namespace mmwoz::schema
