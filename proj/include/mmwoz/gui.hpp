#pragma once

#include "mmwoz/kb.hpp"
#include "mmwoz/layout.hpp"
#include "mmwoz/state.hpp"
#include "mmwoz/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmwoz::gui {

/// Fresh page: restaurant panel active, every panel empty.
GuiState new_session(kb::DatabasePtr db, std::string dialogue_id, LayoutConfig config, std::string session_id = {});

/// The operation actuator. Hit-tests the centre of `op.bbox` against the
/// state's current layout and applies the element's semantics. Returns the
/// successor state; `state` is never modified. Throws NoTargetError,
/// ValueOnClickError, MissingValueError, BookingIncompleteError, or
/// QueryError from a search with malformed time values.
GuiState apply_operation(const GuiState& state, const OperationInstruction& op);

/// The interactive element whose box contains `p`, if any.
std::optional<std::string> hit_test(const layout::Layout& layout, Point p);

struct InventoryItem {
    std::string element_id;
    BBox bbox;
    ElementKind kind;
    std::string text;
};

std::vector<InventoryItem> element_inventory(const GuiState& state, const layout::Layout& layout);

/// Constraints that the search button would send for domain `d`.
std::vector<kb::Constraint> finding_constraints(const GuiState& state, Domain d);

}  // namespace mmwoz::gui
