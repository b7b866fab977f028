#pragma once

#include "mmwoz/annotation.hpp"
#include "mmwoz/compiler.hpp"
#include "mmwoz/types.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace mmwoz::dataset {

struct RawTurn {
    Speaker speaker = Speaker::user;
    std::string utterance;
    /// Belief state annotated on system turns (cumulative, canonical values).
    compiler::DialogueStateFrame state;
    /// Dialogue acts with slots mapped onto the state vocabulary.
    compiler::SystemActionFrame acts;
};

struct RawDialogue {
    std::string dialogue_id;
    std::vector<RawTurn> turns;
    /// Domains the dialogue touches (state, acts or goal).
    std::set<Domain> domains;

    /// Compiler input for every system turn; turn_index is the utterance index.
    [[nodiscard]] std::vector<compiler::TurnInput> system_turns() const;
};

struct MultiwozCorpus {
    std::vector<RawDialogue> dialogues;
    /// Official held-out lists, when the directory ships them.
    std::vector<std::string> dev_ids;
    std::vector<std::string> test_ids;
    /// Dialogues dropped because they touch hospital or police.
    std::vector<std::string> out_of_scope;
};

/// Reads data.json (plus dialogue_acts.json when the turns carry no acts, and
/// valListFile / testListFile when present). Dialogues are returned in id order.
/// Throws ParseError naming the file or the dialogue.
MultiwozCorpus load_multiwoz(const std::filesystem::path& dir);

/// Same, from an already parsed data.json object.
MultiwozCorpus parse_multiwoz(const Json& data, const Json* acts = nullptr);

/// Act slot name (e.g. "Addr", "Leave") in the state vocabulary ("address", "leaveAt").
std::string canonical_act_slot(std::string_view act_slot);

}  // namespace mmwoz::dataset
