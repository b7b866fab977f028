#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmwoz {

/// The five service domains of the simulated information centre, in menu order.
enum class Domain : std::uint8_t { restaurant, hotel, attraction, train, taxi };

inline constexpr std::array<Domain, 5> kAllDomains{Domain::restaurant, Domain::hotel, Domain::attraction,
                                                   Domain::train, Domain::taxi};

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view name);

struct Point {
    int x = 0;
    int y = 0;
    auto operator<=>(const Point&) const = default;
};

/// Pixel rectangle, origin top-left, half-open on x2/y2.
struct BBox {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;

    [[nodiscard]] int width() const { return x2 - x1; }
    [[nodiscard]] int height() const { return y2 - y1; }
    [[nodiscard]] bool empty() const { return x2 <= x1 || y2 <= y1; }
    [[nodiscard]] Point center() const { return {x1 + (x2 - x1 - 1) / 2, y1 + (y2 - y1 - 1) / 2}; }
    [[nodiscard]] bool contains(Point p) const { return p.x >= x1 && p.x < x2 && p.y >= y1 && p.y < y2; }
    [[nodiscard]] bool intersects(const BBox& o) const {
        return x1 < o.x2 && o.x1 < x2 && y1 < o.y2 && o.y1 < y2;
    }
    [[nodiscard]] BBox translated(int dx, int dy) const { return {x1 + dx, y1 + dy, x2 + dx, y2 + dy}; }

    auto operator<=>(const BBox&) const = default;
};

/// "(x1, y1, x2, y2)", the form used when a coordinate is quoted in a response.
std::string format_bbox(const BBox& b);

enum class OpKind : std::uint8_t { click, input };

std::string_view to_string(OpKind k);
std::optional<OpKind> parse_op_kind(std::string_view s);

/// One atomic GUI action. Clicks carry no value; inputs always do.
struct OperationInstruction {
    OpKind kind = OpKind::click;
    BBox bbox;
    std::optional<std::string> value;
    /// Canonical dotted path of the element the box was taken from, e.g.
    /// "restaurant.finding.area.centre". Empty for agent predictions that do not name one.
    std::string element_id;

    bool operator==(const OperationInstruction&) const = default;

    static OperationInstruction click(BBox b, std::string id = {}) {
        return {OpKind::click, b, std::nullopt, std::move(id)};
    }
    static OperationInstruction input(BBox b, std::string value, std::string id = {}) {
        return {OpKind::input, b, std::move(value), std::move(id)};
    }
};

enum class ElementKind : std::uint8_t { interactive, noninteractive };

std::string_view to_string(ElementKind k);

/// What a layout element is; drives rendering and GUI semantics.
enum class ElementRole : std::uint8_t {
    header,
    menu_item,
    title,
    label,
    text_field,
    checkbox,
    button,
    result_row,
    count,
    info,
    outcome,
    message,
};

std::string_view to_string(ElementRole r);

struct Element {
    std::string id;
    BBox bbox;
    ElementKind kind = ElementKind::noninteractive;
    ElementRole role = ElementRole::label;
    std::string text;
    /// Checkbox checked state, active menu item, or selected result row.
    bool checked = false;

    bool operator==(const Element&) const = default;
};

}  // namespace mmwoz
