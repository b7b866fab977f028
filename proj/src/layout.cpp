#include "mmwoz/layout.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/schema.hpp"
#include "mmwoz/text.hpp"

#include <algorithm>
#include <map>

namespace mmwoz::layout {
namespace {

constexpr int kFieldIndent = 112;
constexpr int kCheckboxExtra = 24;
constexpr int kButtonExtra = 16;
constexpr int kOptionGap = 8;
constexpr int kMenuItemWidth = 160;
constexpr int kMenuGap = 8;
constexpr int kJitter = 40;

int text_width(std::string_view s) { return kCharWidth * static_cast<int>(s.size()) + 4; }

std::string slot_label(std::string_view slot) {
    if (slot == "leaveAt") return "leave at";
    if (slot == "arriveBy") return "arrive by";
    if (slot == "pricerange") return "price range";
    if (slot == "id") return "train id";
    return std::string(slot);
}

std::string menu_label(Domain d) {
    std::string s(to_string(d));
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string finding_title(Domain d) {
    switch (d) {
        case Domain::restaurant: return "Find a restaurant";
        case Domain::hotel: return "Find a hotel";
        case Domain::attraction: return "Find an attraction";
        case Domain::train: return "Find a train";
        case Domain::taxi: return "Book a taxi";
    }
    return {};
}

std::string row_text(const kb::EntityRecord& rec) {
    if (rec.domain == Domain::train) {
        return rec.display_key() + "  " + rec.attribute("leaveAt") + " - " + rec.attribute("arriveBy");
    }
    return rec.display_key();
}

/// Appends elements column by column, tracking the vertical cursor.
class ColumnWriter {
public:
    ColumnWriter(std::vector<Element>& out, const BBox& frame)
        : out_(out), x0_(frame.x1 + kPanelPadding), right_(frame.x2 - kPanelPadding), bottom_(frame.y2),
          y_(frame.y1 + kPanelPadding) {}

    int x0() const { return x0_; }
    int right() const { return right_; }
    int y() const { return y_; }
    void advance(int dy = kRowHeight) { y_ += dy; }

    void add(std::string id, int x1, int x2, ElementKind kind, ElementRole role, std::string text,
             bool checked = false) {
        x2 = std::min(x2, right_);
        if (y_ + kTextHeight > bottom_) throw OverflowError("panel content overflows at " + id);
        out_.push_back({std::move(id), {x1, y_, x2, y_ + kTextHeight}, kind, role, std::move(text), checked});
    }

    void line(std::string id, ElementRole role, std::string text, bool checked = false) {
        const int w = text_width(text);
        add(std::move(id), x0_, x0_ + w, ElementKind::noninteractive, role, std::move(text), checked);
        advance();
    }

    void text_field(const std::string& id, std::string_view slot, std::string value) {
        add(id + ".label", x0_, x0_ + text_width(slot_label(slot)), ElementKind::noninteractive, ElementRole::label,
            slot_label(slot));
        add(id, x0_ + kFieldIndent, right_, ElementKind::interactive, ElementRole::text_field, std::move(value));
        advance();
    }

    void button(std::string id, std::string text) {
        const int w = kCharWidth * static_cast<int>(text.size()) + kButtonExtra;
        add(std::move(id), x0_, x0_ + w, ElementKind::interactive, ElementRole::button, std::move(text));
        advance();
    }

    void checkbox_group(const std::string& id, std::string_view slot, const std::vector<std::string>& options,
                        const std::set<std::string>& checked) {
        line(id + ".label", ElementRole::label, slot_label(slot));
        int x = x0_;
        for (const auto& opt : options) {
            const int w = kCharWidth * static_cast<int>(opt.size()) + kCheckboxExtra;
            if (x != x0_ && x + w > right_) {
                x = x0_;
                advance();
            }
            add(id + "." + text::id_component(opt), x, x + w, ElementKind::interactive, ElementRole::checkbox, opt,
                checked.contains(opt));
            x += w + kOptionGap;
        }
        advance();
    }

private:
    std::vector<Element>& out_;
    int x0_;
    int right_;
    int bottom_;
    int y_;
};

std::vector<std::string> checkbox_options(const gui::GuiState& state, Domain d, std::string_view slot) {
    auto fixed = schema::fixed_options(d, slot);
    if (!fixed.empty()) return {fixed.begin(), fixed.end()};
    if (state.db) return state.db->distinct_values(d, std::string(slot));
    return {};
}

void layout_finding(const gui::GuiState& state, Domain d, const BBox& frame, std::vector<Element>& out) {
    const auto& panel = state.panel(d);
    const std::string base = std::string(to_string(d)) + ".finding";
    ColumnWriter col(out, frame);
    col.line(base + ".title", ElementRole::title, finding_title(d));
    for (auto slot : schema::domain_schema(d).finding) {
        const std::string id = base + "." + std::string(slot);
        if (schema::finding_control(d, slot) == schema::Control::checkbox) {
            static const std::set<std::string> kNone;
            auto it = panel.checked.find(std::string(slot));
            col.checkbox_group(id, slot, checkbox_options(state, d, slot), it == panel.checked.end() ? kNone : it->second);
        } else {
            auto it = panel.finding_text.find(std::string(slot));
            col.text_field(id, slot, it == panel.finding_text.end() ? std::string() : it->second);
        }
    }
    col.button(base + ".search", d == Domain::taxi ? "Request" : "Search");
    if (!panel.message.empty()) col.line(base + ".message", ElementRole::message, panel.message);
}

void layout_results(const gui::GuiState& state, Domain d, const BBox& frame, std::vector<Element>& out) {
    if (!schema::domain_schema(d).has_database) return;
    const auto& panel = state.panel(d);
    const std::string base = std::string(to_string(d)) + ".results";
    ColumnWriter col(out, frame);
    col.line(base + ".title", ElementRole::title, "Results");
    if (panel.searched) col.line(base + ".count", ElementRole::count, std::to_string(panel.total_matches) + " matches");
    for (std::size_t i = 0; i < panel.results.size(); ++i) {
        const auto& rec = panel.results[i];
        const bool selected = panel.selected && *panel.selected == rec;
        col.add(base + ".row." + std::to_string(i), col.x0(), col.right(), ElementKind::interactive,
                ElementRole::result_row, row_text(rec), selected);
        col.advance();
    }
}

void layout_side(const gui::GuiState& state, Domain d, const BBox& frame, std::vector<Element>& out) {
    const auto& panel = state.panel(d);
    const auto& sch = schema::domain_schema(d);
    const std::string dom(to_string(d));
    ColumnWriter col(out, frame);
    if (panel.selected && sch.has_database) {
        col.line(dom + ".info.title", ElementRole::title, "Information");
        for (auto attr : sch.info) {
            const std::string value = panel.selected->attribute(std::string(attr));
            if (value.empty()) continue;
            col.line(dom + ".info." + text::id_component(attr), ElementRole::info, slot_label(attr) + ": " + value);
        }
        col.advance(kPanelPadding);
    }
    if (!panel.booking_visible(d)) return;
    col.line(dom + ".booking.title", ElementRole::title, "Booking");
    for (auto slot : sch.booking) {
        auto it = panel.booking.find(std::string(slot));
        col.text_field(dom + ".booking." + std::string(slot), slot,
                       it == panel.booking.end() ? std::string() : it->second);
    }
    if (sch.bookable) col.button(dom + ".booking.book", "Book");
    if (!panel.outcome) return;
    if (const auto* ref = std::get_if<gui::BookingReference>(&*panel.outcome)) {
        col.line(dom + ".booking.reference", ElementRole::outcome, "reference: " + ref->reference);
    } else if (const auto* taxi = std::get_if<kb::TaxiResult>(&*panel.outcome)) {
        col.line(dom + ".booking.car", ElementRole::outcome, "car: " + taxi->car_type);
        col.line(dom + ".booking.phone", ElementRole::outcome, "phone: " + taxi->phone);
    }
}

std::string parent_of(std::string_view id) {
    const auto dot = id.rfind('.');
    return std::string(dot == std::string_view::npos ? id : id.substr(0, dot));
}

BBox clamp_into(const BBox& b, int width, int height) {
    const int w = b.width();
    const int h = b.height();
    const int x1 = std::clamp(b.x1, 0, std::max(0, width - w));
    const int y1 = std::clamp(b.y1, 0, std::max(0, height - h));
    return {x1, y1, x1 + w, y1 + h};
}

bool collides(const BBox& b, const std::vector<BBox>& placed) {
    return std::any_of(placed.begin(), placed.end(), [&](const BBox& p) { return p.intersects(b); });
}

/// First free spot scanning downward from the element's own position, then
/// wrapping to the top, then sweeping horizontally.
BBox find_free_spot(const BBox& b, const std::vector<BBox>& placed, int width, int height) {
    const int w = b.width();
    const int h = b.height();
    std::vector<int> ys;
    for (int y = b.y1; y + h <= height; y += 6) ys.push_back(y);
    for (int y = 0; y < b.y1; y += 6) ys.push_back(y);
    std::vector<int> xs{b.x1};
    for (int x = 0; x + w <= width; x += kCharWidth) {
        if (x != b.x1) xs.push_back(x);
    }
    for (int x : xs) {
        for (int y : ys) {
            BBox cand{x, y, x + w, y + h};
            if (!collides(cand, placed)) return cand;
        }
    }
    throw OverflowError("no free position for perturbed element");
}

}  // namespace

ColumnFrames column_frames(const LayoutConfig& config) {
    const int bottom = config.height - kPanelPadding;
    return {{12, kPanelTop, 412, bottom}, {424, kPanelTop, 852, bottom}, {864, kPanelTop, 1268, bottom}};
}

const Element* Layout::find(std::string_view id) const {
    for (const auto& e : elements) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

std::vector<const Element*> Layout::interactive() const {
    std::vector<const Element*> out;
    for (const auto& e : elements) {
        if (e.kind == ElementKind::interactive) out.push_back(&e);
    }
    return out;
}

void sort_elements(std::vector<Element>& elements) {
    std::sort(elements.begin(), elements.end(), [](const Element& a, const Element& b) {
        if (a.bbox.y1 != b.bbox.y1) return a.bbox.y1 < b.bbox.y1;
        if (a.bbox.x1 != b.bbox.x1) return a.bbox.x1 < b.bbox.x1;
        return a.id < b.id;
    });
}

std::string panel_of(std::string_view id) {
    const auto first = id.find('.');
    const std::string head(id.substr(0, first));
    if (head == "header" || head == "menu" || first == std::string_view::npos) return head;
    const auto rest = id.substr(first + 1);
    const std::string sub(rest.substr(0, rest.find('.')));
    if (sub == "info" || sub == "booking") return head + ".side";
    return head + "." + sub;
}

Layout compute_layout(const gui::GuiState& state, const LayoutConfig& config) {
    const auto frames = column_frames(config);
    if (frames.side.x2 > config.width || frames.side.y2 <= frames.side.y1 + kPanelPadding) {
        throw OverflowError("canvas " + std::to_string(config.width) + "x" + std::to_string(config.height) +
                            " is too small for the page");
    }
    Layout out;
    out.width = config.width;
    out.height = config.height;
    auto& els = out.elements;

    const std::string title = "Cambridge Town Information Centre";
    els.push_back({"header.title", {kPanelPadding, 15, kPanelPadding + text_width(title), 15 + kTextHeight},
                   ElementKind::noninteractive, ElementRole::header, title, false});
    if (!state.dialogue_id.empty()) {
        const std::string info = "dialogue " + state.dialogue_id;
        const int x2 = config.width - kPanelPadding;
        els.push_back({"header.dialogue", {x2 - text_width(info), 15, x2, 15 + kTextHeight},
                       ElementKind::noninteractive, ElementRole::header, info, false});
    }
    for (std::size_t i = 0; i < kAllDomains.size(); ++i) {
        const Domain d = kAllDomains[i];
        const int x1 = kPanelPadding + static_cast<int>(i) * (kMenuItemWidth + kMenuGap);
        els.push_back({"menu." + std::string(to_string(d)),
                       {x1, kMenuTop, x1 + kMenuItemWidth, kMenuTop + kTextHeight},
                       ElementKind::interactive,
                       ElementRole::menu_item,
                       menu_label(d),
                       d == state.active_domain});
    }

    const Domain d = state.active_domain;
    layout_finding(state, d, frames.finding, els);
    layout_results(state, d, frames.results, els);
    layout_side(state, d, frames.side, els);
    sort_elements(els);
    return out;
}

Layout perturb(const Layout& layout, const LayoutConfig& config) {
    if (config.perturb_mode == PerturbMode::none) return layout;
    const auto moves = [&](ElementKind k) {
        switch (config.perturb_mode) {
            case PerturbMode::none: return false;
            case PerturbMode::interactive: return k == ElementKind::interactive;
            case PerturbMode::noninteractive: return k == ElementKind::noninteractive;
            case PerturbMode::both: return true;
        }
        return false;
    };

    Layout out = layout;
    auto& els = out.elements;

    // (panel, kind) -> element indices, in layout order.
    std::map<std::pair<std::string, ElementKind>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < els.size(); ++i) {
        if (moves(els[i].kind)) groups[{panel_of(els[i].id), els[i].kind}].push_back(i);
    }

    for (const auto& [key, members] : groups) {
        StableHasher h;
        h.field("perturb").field(config.seed).field(key.first).field(to_string(key.second));
        SplitMix64 rng(h.digest());

        // Sibling reordering: same parent path and role swap anchor positions.
        std::map<std::pair<std::string, ElementRole>, std::vector<std::size_t>> siblings;
        for (auto i : members) siblings[{parent_of(els[i].id), els[i].role}].push_back(i);
        for (auto& [sk, idx] : siblings) {
            if (idx.size() < 2) continue;
            std::vector<Point> anchors;
            for (auto i : idx) anchors.push_back({els[i].bbox.x1, els[i].bbox.y1});
            std::vector<std::size_t> perm(idx.size());
            for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
            for (std::size_t k = perm.size() - 1; k > 0; --k) {
                std::swap(perm[k], perm[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(k)))]);
            }
            for (std::size_t k = 0; k < idx.size(); ++k) {
                auto& b = els[idx[k]].bbox;
                const Point a = anchors[perm[k]];
                b = {a.x, a.y, a.x + b.width(), a.y + b.height()};
            }
        }

        const int dx = rng.uniform(-kJitter, kJitter);
        const int dy = rng.uniform(-kJitter, kJitter);
        for (auto i : members) els[i].bbox = clamp_into(els[i].bbox.translated(dx, dy), out.width, out.height);
    }

    // Interactive boxes must stay pairwise disjoint for hit-testing.
    std::vector<BBox> placed;
    for (auto& e : els) {
        if (e.kind != ElementKind::interactive) continue;
        if (collides(e.bbox, placed)) e.bbox = find_free_spot(e.bbox, placed, out.width, out.height);
        placed.push_back(e.bbox);
    }

    sort_elements(els);
    return out;
}

Layout current_layout(const gui::GuiState& state) {
    return perturb(compute_layout(state, state.config), state.config);
}

}  // namespace mmwoz::layout
