#include "mmwoz/compiler.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/schema.hpp"
#include "mmwoz/text.hpp"

#include <algorithm>

namespace mmwoz::compiler {
namespace {

std::string strip_article(const std::string& s) { return text::starts_with(s, "the ") ? s.substr(4) : s; }

bool same_name(const std::string& a, const std::string& b) {
    return strip_article(text::normalize_for_match(a)) == strip_article(text::normalize_for_match(b));
}

/// Does `rec` carry the value an entity act names?
bool matches_entity(const kb::EntityRecord& rec, const ActItem& act) {
    if (act.slot == "name" || act.slot == "id") {
        const std::string key = act.slot == "id" ? rec.id : rec.attribute("name");
        return !key.empty() && same_name(key, act.value);
    }
    const std::string attr = rec.attribute(act.slot);
    if (attr.empty()) return false;
    if (act.slot == "postcode" || act.slot == "phone") {
        auto squash = [](std::string s) {
            std::erase_if(s, [](char c) { return c == ' ' || c == '.' || c == ','; });
            return text::lower(s);
        };
        return squash(attr) == squash(act.value);
    }
    return text::normalize_for_match(attr) == text::normalize_for_match(act.value);
}

bool is_key_slot(const std::string& slot) { return slot == "name" || slot == "id"; }

class Emitter {
public:
    Emitter(gui::GuiState state, const CompileOptions& options) : state_(std::move(state)), options_(options) {}

    gui::GuiState& state() { return state_; }
    [[nodiscard]] bool pending() const { return !ops_.empty(); }

    void click(const std::string& id) {
        const auto lay = layout::current_layout(state_);
        const Element* e = lay.find(id);
        if (!e) throw NoTargetError(id + " is not displayed");
        apply(OperationInstruction::click(e->bbox, id));
    }

    void input(const std::string& id, const std::string& value) {
        const auto lay = layout::current_layout(state_);
        const Element* e = lay.find(id);
        if (!e) throw NoTargetError(id + " is not displayed");
        apply(OperationInstruction::input(e->bbox, value, id));
    }

    void apply(const OperationInstruction& op) {
        state_ = gui::apply_operation(state_, op);
        ops_.push_back(op);
    }

    /// Closes the current group with a snapshot of the resulting page.
    void flush() {
        if (ops_.empty()) return;
        groups_.push_back({std::move(ops_), snap()});
        ops_.clear();
    }

    [[nodiscard]] render::Snapshot snap() const {
        return render::snapshot(state_, layout::current_layout(state_), options_.render_images);
    }

    std::vector<OperationGroup> take_groups() { return std::move(groups_); }

private:
    gui::GuiState state_;
    const CompileOptions& options_;
    std::vector<OperationInstruction> ops_;
    std::vector<OperationGroup> groups_;
};

std::string option_id(Domain d, const std::string& slot, const std::string& option) {
    return std::string(to_string(d)) + ".finding." + slot + "." + text::id_component(option);
}

/// Brings one finding slot to `value` (void value = clear a checkbox group).
void set_finding(Emitter& em, Domain d, const std::string& slot, const std::string& value) {
    const auto control = schema::finding_control(d, slot);
    if (!control) throw UnknownSlotError(std::string(to_string(d)) + " has no finding slot '" + slot + "'");
    const auto& panel = em.state().panel(d);
    if (*control == schema::Control::text) {
        if (is_void_value(value)) return;  // text fields cannot be emptied by input
        auto it = panel.finding_text.find(slot);
        if (it != panel.finding_text.end() && it->second == value) return;
        em.apply(slot_to_element(d, slot, value, layout::current_layout(em.state())));
        return;
    }
    std::set<std::string> current;
    if (auto it = panel.checked.find(slot); it != panel.checked.end()) current = it->second;
    // Validate before touching anything so a bad value leaves no partial group.
    std::optional<OperationInstruction> check;
    if (!is_void_value(value) && !current.contains(value)) {
        check = slot_to_element(d, slot, value, layout::current_layout(em.state()));
    }
    for (const auto& opt : current) {
        if (opt != value) em.click(option_id(d, slot, opt));
    }
    if (check) em.click(check->element_id);
}

struct ResolvedAct {
    Domain domain;
    const ActItem* act;
};

std::optional<Domain> booking_domain(const SlotDelta& delta, const std::vector<Domain>& seen, Domain interface) {
    for (const auto& [d, slots] : delta.domains) {
        for (const auto& [slot, v] : slots) {
            if (schema::is_booking_slot(d, slot)) return d;
        }
    }
    for (auto it = seen.rbegin(); it != seen.rend(); ++it) {
        if (schema::domain_schema(*it).bookable) return *it;
    }
    if (schema::domain_schema(interface).bookable) return interface;
    return std::nullopt;
}

std::vector<ResolvedAct> resolve_acts(const SlotDelta& delta, const SystemActionFrame& action, Domain interface) {
    std::vector<ResolvedAct> out;
    std::vector<Domain> seen;
    for (const auto& act : action.acts) {
        std::optional<Domain> d = parse_domain(text::lower(act.domain));
        if (!d && text::lower(act.domain) == "booking") d = booking_domain(delta, seen, interface);
        if (!d) continue;
        out.push_back({*d, &act});
        if (std::find(seen.begin(), seen.end(), *d) == seen.end()) seen.push_back(*d);
    }
    return out;
}

/// First entity-identifying act for `d`; name/id acts win over phone/postcode/address.
const ActItem* entity_mention(const std::vector<ResolvedAct>& acts, Domain d) {
    const ActItem* fallback = nullptr;
    for (const auto& ra : acts) {
        if (ra.domain != d || !schema::is_entity_slot(ra.act->slot) || is_void_value(ra.act->value)) continue;
        if (is_key_slot(ra.act->slot)) return ra.act;
        if (!fallback) fallback = ra.act;
    }
    return fallback;
}

std::optional<std::size_t> find_row(const gui::PanelState& panel, const ActItem& act) {
    for (std::size_t i = 0; i < panel.results.size(); ++i) {
        if (matches_entity(panel.results[i], act)) return i;
    }
    return std::nullopt;
}

void select_entity(Emitter& em, Domain d, const ActItem& act, const DialogueStateFrame& cumulative,
                   CheckedEntityLog& checked) {
    auto row = find_row(em.state().panel(d), act);
    if (!row) {
        const auto& selected = em.state().panel(d).selected;
        if (selected && matches_entity(*selected, act)) return;

        // One retry: the finding form as the dialogue state has it, plus the
        // entity's key so it lands among the displayed rows.
        const kb::EntityRecord* target = nullptr;
        for (const auto& rec : em.state().db->records(d)) {
            if (matches_entity(rec, act)) {
                target = &rec;
                break;
            }
        }
        if (!target) {
            throw EntityNotOnScreenError("'" + act.value + "' (" + act.slot + ") is not in the " +
                                         std::string(to_string(d)) + " database");
        }
        const std::string key_slot(schema::domain_schema(d).display_key);
        for (auto slot : schema::domain_schema(d).finding) {
            const std::string s(slot);
            if (s == key_slot) continue;
            set_finding(em, d, s, schema::canonical_value(d, s, cumulative.value(d, s)));
        }
        if (schema::is_finding_slot(d, key_slot)) set_finding(em, d, key_slot, target->display_key());
        em.click(std::string(to_string(d)) + ".finding.search");
        em.flush();
        row = find_row(em.state().panel(d), act);
        if (!row) {
            throw EntityNotOnScreenError("'" + act.value + "' is not among the displayed " +
                                         std::string(to_string(d)) + " results");
        }
    }
    const auto& panel = em.state().panel(d);
    if (panel.selected && *panel.selected == panel.results[*row]) return;
    const std::string key = panel.results[*row].display_key();
    em.click(std::string(to_string(d)) + ".results.row." + std::to_string(*row));
    em.flush();
    checked.entries.push_back({d, key});
}

}  // namespace

std::string DialogueStateFrame::value(Domain d, const std::string& slot) const {
    auto it = domains.find(d);
    if (it == domains.end()) return {};
    auto jt = it->second.find(slot);
    return jt == it->second.end() ? std::string{} : jt->second;
}

bool SlotDelta::empty() const {
    return std::all_of(domains.begin(), domains.end(), [](const auto& kv) { return kv.second.empty(); });
}

std::size_t CompiledTurn::operation_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.operations.size();
    return n;
}

const render::Snapshot& CompiledTurn::final_snapshot() const {
    return groups.empty() ? snapshot_before : groups.back().snapshot_after;
}

bool is_void_value(const std::string& value) {
    const std::string v = text::normalize_value(value);
    return v.empty() || v == "dontcare" || v == "dont care" || v == "don't care" || v == "do n't care" ||
           v == "not mentioned" || v == "none" || v == "?";
}

SlotDelta diff_states(const DialogueStateFrame& prev, const DialogueStateFrame& curr) {
    SlotDelta delta;
    for (const auto& [d, slots] : curr.domains) {
        for (const auto& [slot, v] : slots) {
            if (is_void_value(v) || prev.value(d, slot) == v) continue;
            delta.domains[d][slot] = v;
        }
    }
    return delta;
}

OperationInstruction slot_to_element(Domain domain, const std::string& slot, const std::string& value,
                                     const layout::Layout& layout, Subpanel sub) {
    const std::string dn(to_string(domain));
    if (sub == Subpanel::booking) {
        if (!schema::is_booking_slot(domain, slot)) throw UnknownSlotError(dn + " has no booking slot '" + slot + "'");
        const std::string id = dn + ".booking." + slot;
        const Element* e = layout.find(id);
        if (!e) throw NoTargetError(id + " is not displayed");
        return OperationInstruction::input(e->bbox, value, id);
    }
    const auto control = schema::finding_control(domain, slot);
    if (!control) throw UnknownSlotError(dn + " has no finding slot '" + slot + "'");
    if (*control == schema::Control::text) {
        const std::string id = dn + ".finding." + slot;
        const Element* e = layout.find(id);
        if (!e) throw NoTargetError(id + " is not displayed");
        return OperationInstruction::input(e->bbox, value, id);
    }
    const auto fixed = schema::fixed_options(domain, slot);
    if (!fixed.empty() && std::find(fixed.begin(), fixed.end(), value) == fixed.end()) {
        throw UnknownOptionError("'" + value + "' is not an option of " + dn + "." + slot);
    }
    const std::string id = option_id(domain, slot, value);
    const Element* e = layout.find(id);
    if (!e) {
        if (fixed.empty()) throw UnknownOptionError("'" + value + "' is not an option of " + dn + "." + slot);
        throw NoTargetError(id + " is not displayed");
    }
    return OperationInstruction::click(e->bbox, id);
}

bool is_booking_trigger(const ActItem& act) {
    const std::string t = text::lower(act.type);
    return t == "book" || t == "offerbooked";
}

std::vector<Domain> turn_domains(const SlotDelta& delta, const SystemActionFrame& action, Domain interface_domain) {
    std::vector<Domain> out;
    for (const auto& ra : resolve_acts(delta, action, interface_domain)) {
        if (std::find(out.begin(), out.end(), ra.domain) == out.end()) out.push_back(ra.domain);
    }
    for (Domain d : kAllDomains) {
        auto it = delta.domains.find(d);
        if (it == delta.domains.end() || it->second.empty()) continue;
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
    return out;
}

TurnResult compile_turn(const gui::GuiState& state, const SlotDelta& delta, const TurnInput& input,
                        CheckedEntityLog checked, const CompileOptions& options) {
    gui::GuiState entry = state;
    entry.turn_index = input.turn_index;
    Emitter em(entry, options);

    CompiledTurn turn;
    turn.turn_index = input.turn_index;
    turn.domains = input.domains.empty() ? turn_domains(delta, input.action, entry.active_domain) : input.domains;
    turn.snapshot_before = em.snap();

    const auto acts = resolve_acts(delta, input.action, entry.active_domain);

    for (Domain d : turn.domains) {
        const std::string dn(to_string(d));
        if (em.state().active_domain != d) {
            em.click("menu." + dn);
            em.flush();
        }

        if (auto it = delta.domains.find(d); it != delta.domains.end()) {
            for (auto slot : schema::domain_schema(d).finding) {
                auto jt = it->second.find(std::string(slot));
                if (jt == it->second.end()) continue;
                set_finding(em, d, jt->first, schema::canonical_value(d, jt->first, jt->second));
            }
        }
        if (em.pending()) {
            em.click(dn + ".finding.search");
            em.flush();
        }

        if (d != Domain::taxi) {
            if (const ActItem* mention = entity_mention(acts, d)) select_entity(em, d, *mention, input.state, checked);
        }

        if (d == Domain::taxi || d == Domain::attraction || !em.state().panel(d).selected) continue;
        for (auto slot : schema::domain_schema(d).booking) {
            const std::string s(slot);
            const std::string v = schema::canonical_value(d, s, input.state.value(d, s));
            if (is_void_value(v)) continue;
            const auto& fields = em.state().panel(d).booking;
            if (auto f = fields.find(s); f != fields.end() && f->second == v) continue;
            em.input(dn + ".booking." + s, v);
        }
        const bool trigger = std::any_of(acts.begin(), acts.end(), [&](const ResolvedAct& ra) {
            return ra.domain == d && is_booking_trigger(*ra.act);
        });
        if (trigger && (em.pending() || !em.state().panel(d).outcome)) em.click(dn + ".booking.book");
        em.flush();
    }

    turn.groups = em.take_groups();
    return {std::move(turn), std::move(em.state()), std::move(checked)};
}

DialogueOutcome compile_dialogue(const std::string& dialogue_id, const std::vector<TurnInput>& turns,
                                 kb::DatabasePtr db, const LayoutConfig& config, const CompileOptions& options) {
    CompiledDialogue out{dialogue_id, {}};
    gui::GuiState state = gui::new_session(std::move(db), dialogue_id, config);
    DialogueStateFrame prev;
    CheckedEntityLog checked;
    for (const auto& t : turns) {
        const SlotDelta delta = diff_states(prev, t.state);
        try {
            auto r = compile_turn(state, delta, t, std::move(checked), options);
            state = std::move(r.state);
            checked = std::move(r.checked);
            out.turns.push_back(std::move(r.turn));
        } catch (const Error& e) {
            return Uncompilable{t.turn_index, e.code() + ": " + e.what()};
        }
        prev = t.state;
    }
    return out;
}

}  // namespace mmwoz::compiler
