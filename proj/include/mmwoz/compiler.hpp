#pragma once

#include "mmwoz/gui.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/layout.hpp"
#include "mmwoz/render.hpp"
#include "mmwoz/state.hpp"
#include "mmwoz/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mmwoz::compiler {

using SlotMap = std::map<std::string, std::string>;

/// Cumulative user constraints at one turn, finding and booking slots together.
struct DialogueStateFrame {
    std::map<Domain, SlotMap> domains;

    [[nodiscard]] std::string value(Domain d, const std::string& slot) const;
    bool operator==(const DialogueStateFrame&) const = default;
};

/// One dialogue act item. `domain` keeps the annotation's act domain
/// ("restaurant", "booking", "general", ...); slots use the state vocabulary
/// (name, address, postcode, phone, ref, id, car, leaveAt, ...).
struct ActItem {
    std::string domain;
    std::string type;
    std::string slot;
    std::string value;

    bool operator==(const ActItem&) const = default;
};

struct SystemActionFrame {
    std::vector<ActItem> acts;
};

/// Slots whose value is new or changed since the previous turn.
struct SlotDelta {
    std::map<Domain, SlotMap> domains;

    [[nodiscard]] bool empty() const;
    bool operator==(const SlotDelta&) const = default;
};

struct CheckedEntity {
    Domain domain;
    std::string display_key;
    bool operator==(const CheckedEntity&) const = default;
};

/// Entities whose result row was clicked, in click order. Append-only.
struct CheckedEntityLog {
    std::vector<CheckedEntity> entries;
};

/// Operations executed on one observation and the observation they lead to.
struct OperationGroup {
    std::vector<OperationInstruction> operations;
    render::Snapshot snapshot_after;
};

struct CompiledTurn {
    int turn_index = 0;
    std::vector<Domain> domains;
    render::Snapshot snapshot_before;
    std::vector<OperationGroup> groups;

    [[nodiscard]] std::size_t operation_count() const;
    /// The observation the response is produced on.
    [[nodiscard]] const render::Snapshot& final_snapshot() const;
};

/// Everything the compiler needs about one system turn.
struct TurnInput {
    int turn_index = 0;
    DialogueStateFrame state;
    SystemActionFrame action;
    /// Turn domains in handling order. Empty = derive with turn_domains().
    std::vector<Domain> domains;
};

struct CompileOptions {
    /// Rasterize snapshots (otherwise only text dump, layout and digest).
    bool render_images = false;
};

enum class Subpanel : std::uint8_t { finding, booking };

/// Added or changed (domain, slot, value) triples; "dontcare"-like and empty values are dropped.
SlotDelta diff_states(const DialogueStateFrame& prev, const DialogueStateFrame& curr);

/// Instruction that sets `slot` to `value` on `layout`: a click on the option
/// checkbox, or an input into the text field. Throws UnknownSlotError and
/// UnknownOptionError; NoTargetError when the subpanel is not displayed.
OperationInstruction slot_to_element(Domain domain, const std::string& slot, const std::string& value,
                                     const layout::Layout& layout, Subpanel sub = Subpanel::finding);

/// True for act types that ask the system to commit a booking.
bool is_booking_trigger(const ActItem& act);

/// Domains handled in a turn: act domains in first-mention order (booking acts
/// resolved to a bookable domain), then remaining delta domains in canonical order.
std::vector<Domain> turn_domains(const SlotDelta& delta, const SystemActionFrame& action, Domain interface_domain);

struct TurnResult {
    CompiledTurn turn;
    gui::GuiState state;
    CheckedEntityLog checked;
};

/// One turn of the compilation loop, executed against the simulator as it goes.
/// Throws EntityNotOnScreenError or any gui error; callers treat both as "uncompilable".
TurnResult compile_turn(const gui::GuiState& state, const SlotDelta& delta, const TurnInput& input,
                        CheckedEntityLog checked, const CompileOptions& options = {});

struct Uncompilable {
    int turn_index = 0;
    std::string reason;
};

struct CompiledDialogue {
    std::string dialogue_id;
    std::vector<CompiledTurn> turns;
};

using DialogueOutcome = std::variant<CompiledDialogue, Uncompilable>;

DialogueOutcome compile_dialogue(const std::string& dialogue_id, const std::vector<TurnInput>& turns,
                                 kb::DatabasePtr db, const LayoutConfig& config, const CompileOptions& options = {});

/// Values treated as "no constraint" by diff_states.
bool is_void_value(const std::string& value);

}  // namespace mmwoz::compiler
