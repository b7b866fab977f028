#include "mmwoz/multiwoz.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/schema.hpp"
#include "mmwoz/text.hpp"

#include <algorithm>
#include <fstream>

namespace mmwoz::dataset {
namespace {

std::string strip_json_suffix(std::string id) {
    if (id.size() > 5 && id.ends_with(".json")) id.resize(id.size() - 5);
    return id;
}

bool out_of_scope_domain(const std::string& d) { return d == "hospital" || d == "police"; }

bool has_value(const Json& slots) {
    if (!slots.is_object()) return false;
    for (const auto& [k, v] : slots.items()) {
        if (v.is_string() && !compiler::is_void_value(v.get<std::string>())) return true;
        if (v.is_array() && !v.empty()) return true;
    }
    return false;
}

compiler::DialogueStateFrame parse_state(const Json& metadata, const std::string& where) {
    compiler::DialogueStateFrame frame;
    if (metadata.is_null()) return frame;
    if (!metadata.is_object()) throw ParseError(where + ": metadata must be an object");
    for (Domain d : kAllDomains) {
        const std::string dn(to_string(d));
        if (!metadata.contains(dn)) continue;
        const Json& dom = metadata[dn];
        for (const char* part : {"book", "semi"}) {
            if (!dom.contains(part)) continue;
            if (!dom[part].is_object()) throw ParseError(where + ": " + dn + "." + part + " must be an object");
            for (const auto& [slot, v] : dom[part].items()) {
                if (!v.is_string()) continue;  // "booked" lists
                const std::string value = schema::canonical_value(d, slot, v.get<std::string>());
                if (compiler::is_void_value(value)) continue;
                frame.domains[d][slot] = value;
            }
        }
    }
    return frame;
}

compiler::SystemActionFrame parse_acts(const Json& acts, const std::string& where) {
    compiler::SystemActionFrame frame;
    if (!acts.is_object()) return frame;  // "No Annotation" and friends
    for (const auto& [key, items] : acts.items()) {
        const auto dash = key.find('-');
        if (dash == std::string::npos) throw ParseError(where + ": malformed act '" + key + "'");
        if (!items.is_array()) throw ParseError(where + ": act '" + key + "' must list slot/value pairs");
        const std::string domain = text::lower(key.substr(0, dash));
        const std::string type = key.substr(dash + 1);
        for (const auto& pair : items) {
            if (!pair.is_array() || pair.size() != 2) throw ParseError(where + ": malformed pair in '" + key + "'");
            const std::string slot = pair[0].is_string() ? pair[0].get<std::string>() : std::string{};
            const std::string value = pair[1].is_string() ? pair[1].get<std::string>() : pair[1].dump();
            frame.acts.push_back({domain, type, canonical_act_slot(slot), text::trim(value)});
        }
    }
    return frame;
}

std::vector<std::string> read_id_list(const std::filesystem::path& dir, const std::string& stem) {
    for (const char* ext : {".txt", ".json", ""}) {
        const auto path = dir / (stem + ext);
        if (!std::filesystem::is_regular_file(path)) continue;
        std::ifstream in(path);
        std::vector<std::string> ids;
        std::string line;
        while (std::getline(in, line)) {
            line = text::trim(line);
            if (!line.empty()) ids.push_back(strip_json_suffix(line));
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }
    return {};
}

}  // namespace

std::string canonical_act_slot(std::string_view act_slot) {
    static const std::pair<std::string_view, std::string_view> kMap[] = {
        {"addr", "address"},   {"area", "area"},         {"arrive", "arriveBy"},  {"car", "car"},
        {"choice", "choice"},  {"day", "day"},           {"depart", "departure"}, {"dest", "destination"},
        {"fee", "entrance fee"}, {"food", "food"},       {"id", "id"},            {"internet", "internet"},
        {"leave", "leaveAt"},  {"name", "name"},         {"open", "openhours"},   {"parking", "parking"},
        {"people", "people"},  {"phone", "phone"},       {"post", "postcode"},    {"price", "pricerange"},
        {"ref", "ref"},        {"stars", "stars"},       {"stay", "stay"},        {"ticket", "price"},
        {"time", "time"},      {"type", "type"},         {"none", "none"},        {"trainid", "id"},
    };
    const std::string key = text::lower(act_slot);
    for (const auto& [from, to] : kMap) {
        if (key == from) return std::string(to);
    }
    return key;
}

std::vector<compiler::TurnInput> RawDialogue::system_turns() const {
    std::vector<compiler::TurnInput> out;
    for (std::size_t i = 1; i < turns.size(); i += 2) {
        out.push_back({static_cast<int>(i), turns[i].state, turns[i].acts, {}});
    }
    return out;
}

MultiwozCorpus parse_multiwoz(const Json& data, const Json* external_acts) {
    if (!data.is_object()) throw ParseError("data.json must map dialogue ids to dialogues");
    MultiwozCorpus corpus;
    for (const auto& [raw_id, dlg] : data.items()) {
        const std::string id = strip_json_suffix(raw_id);
        if (!dlg.is_object() || !dlg.contains("log") || !dlg["log"].is_array()) {
            throw ParseError(id + ": missing 'log' array");
        }
        RawDialogue rd;
        rd.dialogue_id = id;
        bool scope_violation = false;

        if (dlg.contains("goal") && dlg["goal"].is_object()) {
            for (const auto& [gd, g] : dlg["goal"].items()) {
                if (!g.is_object() || g.empty()) continue;
                if (out_of_scope_domain(gd)) scope_violation = true;
                if (auto d = parse_domain(gd)) rd.domains.insert(*d);
            }
        }

        const Json& log = dlg["log"];
        for (std::size_t i = 0; i < log.size(); ++i) {
            const std::string where = id + " turn " + std::to_string(i);
            const Json& t = log[i];
            if (!t.is_object() || !t.contains("text") || !t["text"].is_string()) {
                throw ParseError(where + ": missing 'text'");
            }
            RawTurn rt;
            rt.speaker = i % 2 == 0 ? Speaker::user : Speaker::system;
            rt.utterance = text::trim(t["text"].get<std::string>());
            if (rt.speaker == Speaker::system) {
                if (t.contains("metadata")) {
                    const Json& md = t["metadata"];
                    rt.state = parse_state(md, where);
                    if (md.is_object()) {
                        for (const auto& [md_domain, v] : md.items()) {
                            if (!out_of_scope_domain(md_domain) || !v.is_object()) continue;
                            for (const char* part : {"semi", "book"}) {
                                if (v.contains(part) && has_value(v[part])) scope_violation = true;
                            }
                        }
                    }
                }
                const Json* acts = t.contains("dialog_act") ? &t["dialog_act"] : nullptr;
                if ((!acts || acts->empty()) && external_acts && external_acts->contains(id)) {
                    const Json& per_dialogue = (*external_acts)[id];
                    const std::string key = std::to_string(i / 2 + 1);
                    if (per_dialogue.is_object() && per_dialogue.contains(key)) acts = &per_dialogue[key];
                }
                if (acts) rt.acts = parse_acts(*acts, where);
            } else if (t.contains("dialog_act")) {
                for (const auto& [key, items] : t["dialog_act"].items()) {
                    if (out_of_scope_domain(text::lower(key.substr(0, key.find('-'))))) scope_violation = true;
                }
            }
            for (const auto& a : rt.acts.acts) {
                if (out_of_scope_domain(a.domain)) scope_violation = true;
                if (auto d = parse_domain(a.domain)) rd.domains.insert(*d);
            }
            for (const auto& [d, slots] : rt.state.domains) {
                if (!slots.empty()) rd.domains.insert(d);
            }
            rd.turns.push_back(std::move(rt));
        }
        if (scope_violation) {
            corpus.out_of_scope.push_back(id);
            continue;
        }
        corpus.dialogues.push_back(std::move(rd));
    }
    std::sort(corpus.dialogues.begin(), corpus.dialogues.end(),
              [](const RawDialogue& a, const RawDialogue& b) { return a.dialogue_id < b.dialogue_id; });
    std::sort(corpus.out_of_scope.begin(), corpus.out_of_scope.end());
    return corpus;
}

MultiwozCorpus load_multiwoz(const std::filesystem::path& dir) {
    const auto data_path = dir / "data.json";
    if (!std::filesystem::is_regular_file(data_path)) throw ParseError(data_path.string() + ": not found");
    const Json data = read_json_file(data_path);
    Json acts;
    const auto acts_path = dir / "dialogue_acts.json";
    if (std::filesystem::is_regular_file(acts_path)) {
        const Json raw = read_json_file(acts_path);
        acts = Json::object();
        for (const auto& [k, v] : raw.items()) acts[strip_json_suffix(k)] = v;
    }
    MultiwozCorpus corpus;
    try {
        corpus = parse_multiwoz(data, acts.is_object() ? &acts : nullptr);
    } catch (const ParseError& e) {
        throw ParseError(data_path.string() + ": " + e.what());
    }
    corpus.dev_ids = read_id_list(dir, "valListFile");
    corpus.test_ids = read_id_list(dir, "testListFile");
    return corpus;
}

}  // namespace mmwoz::dataset
