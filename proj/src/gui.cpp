#include "mmwoz/gui.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/schema.hpp"
#include "mmwoz/text.hpp"

#include <sstream>

namespace mmwoz {

std::string_view to_string(PerturbMode m) {
    switch (m) {
        case PerturbMode::none: return "none";
        case PerturbMode::interactive: return "interactive";
        case PerturbMode::noninteractive: return "noninteractive";
        case PerturbMode::both: return "both";
    }
    return "none";
}

std::optional<PerturbMode> parse_perturb_mode(std::string_view s) {
    for (auto m : {PerturbMode::none, PerturbMode::interactive, PerturbMode::noninteractive, PerturbMode::both}) {
        if (to_string(m) == s) return m;
    }
    return std::nullopt;
}

namespace gui {
namespace {

struct ElementPath {
    Domain domain;
    std::string sub;   // finding | results | booking | info
    std::string slot;  // field slot, "search", "book", "row"
    std::string rest;
};

ElementPath parse_path(const std::string& id) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : id) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    auto d = parse_domain(parts[0]);
    if (!d || parts.size() < 3) throw NoTargetError("element " + id + " is not operable");
    ElementPath p{*d, parts[1], parts[2], {}};
    for (std::size_t i = 3; i < parts.size(); ++i) p.rest += (i > 3 ? "." : "") + parts[i];
    return p;
}

std::string record_key(const kb::EntityRecord& r) {
    return r.display_key() + "|" + r.id + "|" + r.attribute("address") + "|" + r.attribute("day");
}

void run_search(GuiState& s, Domain d) {
    auto& panel = s.panel(d);
    auto constraints = finding_constraints(s, d);
    panel.searched = true;
    panel.message.clear();
    if (d == Domain::taxi) {
        try {
            panel.outcome = kb::generate_taxi(*s.db, s.dialogue_id, constraints);
        } catch (const QueryError&) {
            panel.outcome.reset();
            panel.message = "enter departure and destination";
        }
        return;
    }
    auto rows = kb::query(*s.db, d, constraints);
    panel.total_matches = rows.size();
    if (rows.size() > kResultDisplayCap) rows.resize(kResultDisplayCap);
    panel.results = std::move(rows);
}

void run_booking(GuiState& s, Domain d) {
    auto& panel = s.panel(d);
    for (auto slot : schema::domain_schema(d).booking) {
        auto it = panel.booking.find(std::string(slot));
        if (it == panel.booking.end() || text::trim(it->second).empty()) {
            throw BookingIncompleteError("booking field '" + std::string(slot) + "' is empty");
        }
    }
    panel.outcome = BookingReference{kb::generate_booking_reference(s.dialogue_id, d, s.turn_index)};
}

}  // namespace

bool PanelState::booking_visible(Domain d) const {
    if (d == Domain::taxi) return true;
    return schema::domain_schema(d).bookable && selected.has_value();
}

std::string canonical_form(const GuiState& s) {
    std::ostringstream out;
    out << "session=" << s.session_id << "\ndialogue=" << s.dialogue_id << "\nturn=" << s.turn_index
        << "\nactive=" << to_string(s.active_domain) << "\nlayout=" << s.config.width << "x" << s.config.height << ","
        << to_string(s.config.perturb_mode) << "," << s.config.seed << "\n";
    for (const auto& [d, p] : s.panels) {
        const std::string dn(to_string(d));
        for (const auto& [slot, opts] : p.checked) {
            for (const auto& o : opts) out << dn << ".checked." << slot << "=" << o << "\n";
        }
        for (const auto& [slot, v] : p.finding_text) out << dn << ".text." << slot << "=" << v << "\n";
        out << dn << ".searched=" << p.searched << "\n" << dn << ".total=" << p.total_matches << "\n";
        for (const auto& r : p.results) out << dn << ".row=" << record_key(r) << "\n";
        if (p.selected) out << dn << ".selected=" << record_key(*p.selected) << "\n";
        for (const auto& [slot, v] : p.booking) out << dn << ".booking." << slot << "=" << v << "\n";
        if (p.outcome) {
            if (const auto* ref = std::get_if<BookingReference>(&*p.outcome)) {
                out << dn << ".reference=" << ref->reference << "\n";
            } else if (const auto* taxi = std::get_if<kb::TaxiResult>(&*p.outcome)) {
                out << dn << ".taxi=" << taxi->car_type << "|" << taxi->phone << "\n";
            }
        }
        if (!p.message.empty()) out << dn << ".message=" << p.message << "\n";
    }
    return out.str();
}

std::uint64_t state_digest(const GuiState& s) {
    StableHasher h;
    h.bytes(canonical_form(s));
    return h.digest();
}

GuiState new_session(kb::DatabasePtr db, std::string dialogue_id, LayoutConfig config, std::string session_id) {
    GuiState s;
    s.db = std::move(db);
    s.config = config;
    s.dialogue_id = std::move(dialogue_id);
    s.session_id = std::move(session_id);
    for (Domain d : kAllDomains) s.panels[d] = PanelState{};
    return s;
}

std::optional<std::string> hit_test(const layout::Layout& layout, Point p) {
    for (const auto& e : layout.elements) {
        if (e.kind == ElementKind::interactive && e.bbox.contains(p)) return e.id;
    }
    return std::nullopt;
}

std::vector<InventoryItem> element_inventory(const GuiState&, const layout::Layout& layout) {
    std::vector<InventoryItem> out;
    out.reserve(layout.elements.size());
    for (const auto& e : layout.elements) out.push_back({e.id, e.bbox, e.kind, e.text});
    return out;
}

std::vector<kb::Constraint> finding_constraints(const GuiState& state, Domain d) {
    const auto& panel = state.panel(d);
    std::vector<kb::Constraint> out;
    for (auto slot : schema::domain_schema(d).finding) {
        const std::string s(slot);
        if (auto it = panel.checked.find(s); it != panel.checked.end()) {
            for (const auto& opt : it->second) out.push_back(kb::make_constraint(s, opt));
        }
        if (auto it = panel.finding_text.find(s); it != panel.finding_text.end() && !text::trim(it->second).empty()) {
            out.push_back(kb::make_constraint(s, it->second));
        }
    }
    return out;
}

GuiState apply_operation(const GuiState& state, const OperationInstruction& op) {
    if (op.kind == OpKind::click && op.value) throw ValueOnClickError("click carries a value");
    if (op.kind == OpKind::input && (!op.value || op.value->empty())) {
        throw MissingValueError("input without a value");
    }

    const auto lay = layout::current_layout(state);
    const Point target = op.bbox.center();
    const auto hit = hit_test(lay, target);
    if (!hit) {
        throw NoTargetError("nothing interactive at (" + std::to_string(target.x) + ", " + std::to_string(target.y) +
                            ")");
    }
    const Element& el = *lay.find(*hit);

    GuiState next = state;
    if (el.role == ElementRole::menu_item) {
        if (op.kind == OpKind::input) throw NoTargetError(el.id + " does not accept input");
        next.active_domain = *parse_domain(el.id.substr(el.id.find('.') + 1));
        return next;
    }

    const ElementPath path = parse_path(el.id);
    auto& panel = next.panel(path.domain);

    if (el.role == ElementRole::text_field) {
        if (op.kind == OpKind::click) return next;  // focus is implicit
        if (path.sub == "booking") panel.booking[path.slot] = *op.value;
        else panel.finding_text[path.slot] = *op.value;
        return next;
    }
    if (op.kind == OpKind::input) throw NoTargetError(el.id + " does not accept input");

    switch (el.role) {
        case ElementRole::checkbox: {
            auto& opts = panel.checked[path.slot];
            if (!opts.erase(el.text)) opts.insert(el.text);
            if (opts.empty()) panel.checked.erase(path.slot);
            break;
        }
        case ElementRole::button:
            if (path.slot == "search") run_search(next, path.domain);
            else if (path.slot == "book") run_booking(next, path.domain);
            break;
        case ElementRole::result_row: {
            const auto index = static_cast<std::size_t>(std::stoul(path.rest));
            const auto& rec = panel.results.at(index);
            if (!panel.selected || !(*panel.selected == rec)) panel.outcome.reset();
            panel.selected = rec;
            break;
        }
        default:
            throw NoTargetError(el.id + " is not operable");
    }
    return next;
}

}  // namespace gui
}  // namespace mmwoz
