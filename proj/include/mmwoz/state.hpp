#pragma once

#include "mmwoz/kb.hpp"
#include "mmwoz/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace mmwoz {

enum class PerturbMode : std::uint8_t { none, interactive, noninteractive, both };

std::string_view to_string(PerturbMode m);
std::optional<PerturbMode> parse_perturb_mode(std::string_view s);

struct LayoutConfig {
    int width = 1280;
    int height = 960;
    PerturbMode perturb_mode = PerturbMode::none;
    std::uint64_t seed = 0;

    bool operator==(const LayoutConfig&) const = default;
};

namespace gui {

/// At most this many result rows are displayed; the match count is always shown.
inline constexpr std::size_t kResultDisplayCap = 7;

struct BookingReference {
    std::string reference;
    bool operator==(const BookingReference&) const = default;
};

using BookingOutcome = std::variant<BookingReference, kb::TaxiResult>;

/// State of one domain panel: finding form, results, selection, booking form.
struct PanelState {
    /// Checkbox slot -> checked options.
    std::map<std::string, std::set<std::string>> checked;
    /// Text slot -> current field text (finding subpanel).
    std::map<std::string, std::string> finding_text;
    bool searched = false;
    /// Displayed rows (at most kResultDisplayCap).
    std::vector<kb::EntityRecord> results;
    std::size_t total_matches = 0;
    std::optional<kb::EntityRecord> selected;
    std::map<std::string, std::string> booking;
    std::optional<BookingOutcome> outcome;
    /// Validation text shown under the search button (e.g. incomplete taxi form).
    std::string message;

    bool operator==(const PanelState&) const = default;

    [[nodiscard]] bool booking_visible(Domain d) const;
};

/// Complete observable state of the simulated page.
struct GuiState {
    kb::DatabasePtr db;
    LayoutConfig config;
    std::string session_id;
    std::string dialogue_id;
    /// Index of the dialogue turn being served; feeds booking references.
    int turn_index = 0;
    Domain active_domain = Domain::restaurant;
    std::map<Domain, PanelState> panels;

    [[nodiscard]] const PanelState& panel(Domain d) const { return panels.at(d); }
    [[nodiscard]] PanelState& panel(Domain d) { return panels.at(d); }

    /// Structural equality; the database handle is compared by identity.
    bool operator==(const GuiState& o) const {
        return db == o.db && config == o.config && session_id == o.session_id && dialogue_id == o.dialogue_id &&
               turn_index == o.turn_index && active_domain == o.active_domain && panels == o.panels;
    }
};

/// Canonical text form of everything observable in a state (no database contents).
std::string canonical_form(const GuiState& s);
/// 64-bit stable hash of canonical_form.
std::uint64_t state_digest(const GuiState& s);

}  // namespace gui
}  // namespace mmwoz
