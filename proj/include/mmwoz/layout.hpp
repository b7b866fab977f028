#pragma once

#include "mmwoz/state.hpp"
#include "mmwoz/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmwoz::layout {

inline constexpr int kCharWidth = 8;
inline constexpr int kTextHeight = 18;
inline constexpr int kRowHeight = 24;
inline constexpr int kPanelPadding = 12;

inline constexpr int kHeaderBottom = 48;
inline constexpr int kMenuTop = 58;
inline constexpr int kPanelTop = 96;

/// Fixed column frames of the domain panel; the renderer draws them even when
/// perturbation moves elements around.
struct ColumnFrames {
    BBox finding;
    BBox results;
    BBox side;
};
ColumnFrames column_frames(const LayoutConfig& config);

/// Every visible element of one page state, ordered by (y1, x1, id).
struct Layout {
    int width = 1280;
    int height = 960;
    std::vector<Element> elements;

    [[nodiscard]] const Element* find(std::string_view id) const;
    [[nodiscard]] std::vector<const Element*> interactive() const;

    bool operator==(const Layout&) const = default;
};

/// Deterministic layout of `state` (unperturbed). Throws OverflowError if
/// content cannot fit the canvas.
Layout compute_layout(const gui::GuiState& state, const LayoutConfig& config);

/// Seeded jitter and sibling reordering of the element kind(s) selected by
/// `config.perturb_mode`; identity for PerturbMode::none.
Layout perturb(const Layout& layout, const LayoutConfig& config);

/// compute_layout followed by perturb with the state's own config.
Layout current_layout(const gui::GuiState& state);

/// Re-sorts elements into (y1, x1, id) order.
void sort_elements(std::vector<Element>& elements);

/// Panel an element belongs to, from its id: "header", "menu", "<domain>.finding",
/// "<domain>.results" or "<domain>.side".
std::string panel_of(std::string_view element_id);

}  // namespace mmwoz::layout
