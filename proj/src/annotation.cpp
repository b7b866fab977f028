#include "mmwoz/annotation.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/hash.hpp"

#include <fstream>
#include <sstream>

namespace mmwoz {
namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
    return j.at(key);
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must be a string");
    return v.get<std::string>();
}

ScreenStep step_from_json(const Json& j, const std::string& where) {
    ScreenStep s;
    const Json& snap = require(j, "snapshot", where);
    if (snap.is_string()) s.snapshot = snap.get<std::string>();
    else if (!snap.is_null()) throw SchemaError(where + ": 'snapshot' must be a path or null");
    s.state_digest = parse_hex64(require_string(j, "state_digest", where));
    const Json& inv = require(j, "interactive", where);
    if (!inv.is_array()) throw SchemaError(where + ": 'interactive' must be an array");
    for (const auto& item : inv) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string()) {
            throw SchemaError(where + ": malformed inventory item");
        }
        s.interactive.emplace_back(item[0].get<std::string>(), bbox_from_json(item[1]));
    }
    if (j.contains("text")) {
        if (!j["text"].is_array()) throw SchemaError(where + ": 'text' must be an array");
        s.text = j["text"].get<std::vector<std::string>>();
    }
    const Json& ops = require(j, "operations", where);
    if (!ops.is_array()) throw SchemaError(where + ": 'operations' must be an array");
    for (const auto& op : ops) s.operations.push_back(operation_from_json(op));
    return s;
}

}  // namespace

std::string_view to_string(Speaker s) { return s == Speaker::user ? "user" : "system"; }

Json bbox_to_json(const BBox& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

BBox bbox_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 4) throw SchemaError("bbox must be [x1, y1, x2, y2]");
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw SchemaError("bbox coordinates must be integers");
    }
    return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

Json operation_to_json(const OperationInstruction& op) {
    Json j = Json::object();
    j["op"] = std::string(to_string(op.kind));
    j["bbox"] = bbox_to_json(op.bbox);
    if (op.value) j["value"] = *op.value;
    if (!op.element_id.empty()) j["element_id"] = op.element_id;
    return j;
}

OperationInstruction operation_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("operation must be an object");
    const auto kind = parse_op_kind(require_string(j, "op", "operation"));
    if (!kind) throw SchemaError("operation: 'op' must be click or input");
    OperationInstruction op;
    op.kind = *kind;
    op.bbox = bbox_from_json(require(j, "bbox", "operation"));
    if (j.contains("value") && !j["value"].is_null()) {
        if (!j["value"].is_string()) throw SchemaError("operation: 'value' must be a string");
        op.value = j["value"].get<std::string>();
    }
    if (j.contains("element_id") && !j["element_id"].is_null()) {
        if (!j["element_id"].is_string()) throw SchemaError("operation: 'element_id' must be a string");
        op.element_id = j["element_id"].get<std::string>();
    }
    return op;
}

Json dialogue_to_json(const MmwozDialogue& d) {
    Json turns = Json::array();
    for (const auto& t : d.turns) {
        Json jt = Json::object();
        jt["turn_index"] = t.turn_index;
        jt["speaker"] = std::string(to_string(t.speaker));
        jt["utterance"] = t.utterance;
        if (t.speaker == Speaker::system) {
            Json doms = Json::array();
            for (Domain dm : t.domains) doms.push_back(std::string(to_string(dm)));
            jt["domains"] = doms;
        }
        if (t.screen_annotation) {
            Json steps = Json::array();
            for (const auto& s : *t.screen_annotation) {
                Json js = Json::object();
                js["snapshot"] = s.snapshot ? Json(*s.snapshot) : Json(nullptr);
                js["state_digest"] = to_hex64(s.state_digest);
                Json inv = Json::array();
                for (const auto& [id, b] : s.interactive) inv.push_back(Json::array({id, bbox_to_json(b)}));
                js["interactive"] = inv;
                if (s.text) js["text"] = *s.text;
                Json ops = Json::array();
                for (const auto& op : s.operations) ops.push_back(operation_to_json(op));
                js["operations"] = ops;
                steps.push_back(js);
            }
            jt["screen_annotation"] = steps;
        }
        if (t.speaker == Speaker::system) {
            Json ms = Json::array();
            for (const auto& m : t.entity_mentions) {
                Json jm = Json::object();
                jm["value"] = m.value;
                jm["slot"] = m.slot;
                jm["element_id"] = m.element_id ? Json(*m.element_id) : Json(nullptr);
                jm["bbox"] = m.bbox ? bbox_to_json(*m.bbox) : Json(nullptr);
                ms.push_back(jm);
            }
            jt["entity_mentions"] = ms;
        }
        turns.push_back(jt);
    }
    Json j = Json::object();
    j["dialogue_id"] = d.dialogue_id;
    j["turns"] = turns;
    return j;
}

MmwozDialogue dialogue_from_json(const Json& j) {
    MmwozDialogue d;
    d.dialogue_id = require_string(j, "dialogue_id", "dialogue");
    const Json& turns = require(j, "turns", d.dialogue_id);
    if (!turns.is_array()) throw SchemaError(d.dialogue_id + ": 'turns' must be an array");
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const std::string where = d.dialogue_id + " turn " + std::to_string(i);
        const Json& jt = turns[i];
        MmwozTurn t;
        const Json& idx = require(jt, "turn_index", where);
        if (!idx.is_number_integer()) throw SchemaError(where + ": 'turn_index' must be an integer");
        t.turn_index = idx.get<int>();
        const std::string speaker = require_string(jt, "speaker", where);
        if (speaker == "user") t.speaker = Speaker::user;
        else if (speaker == "system") t.speaker = Speaker::system;
        else throw SchemaError(where + ": unknown speaker '" + speaker + "'");
        if (t.speaker != (i % 2 == 0 ? Speaker::user : Speaker::system)) {
            throw SchemaError(where + ": speakers must alternate starting with user");
        }
        t.utterance = require_string(jt, "utterance", where);
        if (jt.contains("domains")) {
            for (const auto& dm : jt["domains"]) {
                auto parsed = dm.is_string() ? parse_domain(dm.get<std::string>()) : std::nullopt;
                if (!parsed) throw SchemaError(where + ": unknown domain");
                t.domains.push_back(*parsed);
            }
        }
        if (jt.contains("screen_annotation")) {
            if (t.speaker == Speaker::user) throw SchemaError(where + ": user turns carry no screen annotation");
            const Json& steps = jt["screen_annotation"];
            if (!steps.is_array()) throw SchemaError(where + ": 'screen_annotation' must be an array");
            t.screen_annotation.emplace();
            for (const auto& s : steps) t.screen_annotation->push_back(step_from_json(s, where));
        } else if (t.speaker == Speaker::system) {
            throw SchemaError(where + ": system turn without screen annotation");
        }
        if (jt.contains("entity_mentions")) {
            for (const auto& m : jt["entity_mentions"]) {
                EntityMention em;
                em.value = require_string(m, "value", where);
                if (m.contains("slot") && m["slot"].is_string()) em.slot = m["slot"].get<std::string>();
                if (m.contains("element_id") && m["element_id"].is_string()) {
                    em.element_id = m["element_id"].get<std::string>();
                }
                if (m.contains("bbox") && !m["bbox"].is_null()) em.bbox = bbox_from_json(m["bbox"]);
                t.entity_mentions.push_back(std::move(em));
            }
        }
        d.turns.push_back(std::move(t));
    }
    return d;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

MmwozDialogue read_dialogue_file(const std::filesystem::path& path) {
    try {
        return dialogue_from_json(read_json_file(path));
    } catch (const SchemaError& e) {
        throw SchemaError(path.filename().string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

}  // namespace mmwoz
