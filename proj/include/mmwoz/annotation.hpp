#pragma once

// MMWOZ annotation files: one JSON document per dialogue.
//
// {
//   "dialogue_id": "MUL0001",
//   "turns": [
//     {"turn_index": 0, "speaker": "user", "utterance": "..."},
//     {"turn_index": 1, "speaker": "system", "utterance": "...",
//      "domains": ["restaurant"],
//      "screen_annotation": [
//        {"snapshot": "images/MUL0001_1_0.png" | null,
//         "state_digest": "9f0c...",
//         "interactive": [["menu.restaurant", [12, 58, 172, 76]], ...],
//         "text": ["Cambridge Town Information Centre", ...],      (optional)
//         "operations": [{"op": "click", "bbox": [x1, y1, x2, y2], "element_id": "..."},
//                        {"op": "input", "bbox": [...], "value": "indian", "element_id": "..."}]},
//        ...                                   (last entry: the page the response is given on, no operations)
//      ],
//      "entity_mentions": [{"value": "01223354679", "slot": "phone",
//                           "element_id": "restaurant.info.phone" | null, "bbox": [...] | null}]}
//   ]
// }

#include "mmwoz/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mmwoz {

using Json = nlohmann::json;

enum class Speaker : std::uint8_t { user, system };

std::string_view to_string(Speaker s);

/// One observation and the operations performed on it.
struct ScreenStep {
    std::optional<std::string> snapshot;
    std::uint64_t state_digest = 0;
    std::vector<std::pair<std::string, BBox>> interactive;
    std::optional<std::vector<std::string>> text;
    std::vector<OperationInstruction> operations;

    bool operator==(const ScreenStep&) const = default;
};

struct EntityMention {
    std::string value;
    std::string slot;
    std::optional<std::string> element_id;
    std::optional<BBox> bbox;

    bool operator==(const EntityMention&) const = default;
};

struct MmwozTurn {
    int turn_index = 0;
    Speaker speaker = Speaker::user;
    std::string utterance;
    std::vector<Domain> domains;
    /// Present on system turns only.
    std::optional<std::vector<ScreenStep>> screen_annotation;
    std::vector<EntityMention> entity_mentions;

    bool operator==(const MmwozTurn&) const = default;
};

struct MmwozDialogue {
    std::string dialogue_id;
    std::vector<MmwozTurn> turns;

    bool operator==(const MmwozDialogue&) const = default;
};

Json bbox_to_json(const BBox& b);
BBox bbox_from_json(const Json& j);

Json operation_to_json(const OperationInstruction& op);
/// Throws SchemaError naming the offending field.
OperationInstruction operation_from_json(const Json& j);

Json dialogue_to_json(const MmwozDialogue& d);
/// Validates the schema; throws SchemaError.
MmwozDialogue dialogue_from_json(const Json& j);

MmwozDialogue read_dialogue_file(const std::filesystem::path& path);
/// Compact, deterministic serialization followed by a newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

}  // namespace mmwoz
