#include "mmwoz/session.hpp"

#include "mmwoz/dataset.hpp"
#include "mmwoz/errors.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/layout.hpp"
#include "mmwoz/render.hpp"

#include <algorithm>

namespace mmwoz::serve {
namespace {

Json error_reply(const std::string& type, const std::string& message) {
    return Json{{"ok", false}, {"error", Json{{"type", type}, {"message", message}}}};
}

const std::string& require_text(const Json& msg, const char* key) {
    if (!msg.contains(key) || !msg[key].is_string()) {
        throw ProtocolError(std::string("'") + key + "' must be a string");
    }
    return msg[key].get_ref<const std::string&>();
}

ScreenStep current_step(const gui::GuiState& g) {
    ScreenStep s;
    s.state_digest = gui::state_digest(g);
    const auto lay = layout::current_layout(g);
    for (const Element* e : lay.interactive()) s.interactive.emplace_back(e->id, e->bbox);
    return s;
}

std::string snapshot_stem(const SessionState& s) {
    const std::string& owner = s.gui.session_id.empty() ? s.gui.dialogue_id : s.gui.session_id;
    return owner + "_" + std::to_string(s.gui.turn_index) + "_" + std::to_string(s.action_log.size());
}

void on_reset(SessionState& s, const Json& msg) {
    const std::string dialogue_id = msg.contains("dialogue_id") ? require_text(msg, "dialogue_id") : "session";
    const std::string session_id = msg.contains("session_id") ? require_text(msg, "session_id") : "";
    ImageMode mode = ImageMode::none;
    if (msg.contains("images")) {
        const std::string& m = require_text(msg, "images");
        if (m == "path") mode = ImageMode::path;
        else if (m == "base64") mode = ImageMode::base64;
        else if (m != "none") throw ProtocolError("'images' must be none, path or base64");
    }
    s.gui = gui::new_session(s.db, dialogue_id, s.options.layout, session_id);
    s.images = mode;
    s.history.clear();
    s.action_log.clear();
    s.pending_user.reset();
    s.open = true;
}

void on_user_say(SessionState& s, const Json& msg) {
    const std::string& text = require_text(msg, "text");
    if (s.pending_user) throw ProtocolError("the user already spoke; respond first");
    MmwozTurn t;
    t.turn_index = static_cast<int>(s.history.size());
    t.speaker = Speaker::user;
    t.utterance = text;
    s.history.push_back(std::move(t));
    s.pending_user = text;
    s.gui.turn_index = static_cast<int>(s.history.size());
}

void on_act(SessionState& s, const Json& msg) {
    if (!s.pending_user) throw ProtocolError("no system turn in progress; send user_say first");
    if (!msg.contains("op")) throw ProtocolError("act needs an 'op'");
    OperationInstruction op = operation_from_json(msg["op"]);
    if (op.element_id.empty()) {
        if (auto hit = gui::hit_test(layout::current_layout(s.gui), op.bbox.center())) op.element_id = *hit;
    }
    ScreenStep step = current_step(s.gui);
    s.gui = gui::apply_operation(s.gui, op);
    step.operations.push_back(std::move(op));
    s.action_log.push_back(std::move(step));
}

void on_respond(SessionState& s, const Json& msg) {
    const std::string& text = require_text(msg, "text");
    if (!s.pending_user) throw ProtocolError("nothing to respond to; send user_say first");
    MmwozTurn t;
    t.turn_index = static_cast<int>(s.history.size());
    t.speaker = Speaker::system;
    t.utterance = text;
    for (const auto& step : s.action_log) {
        for (const auto& op : step.operations) {
            auto d = parse_domain(dataset::operation_domain(op));
            if (d && std::find(t.domains.begin(), t.domains.end(), *d) == t.domains.end()) t.domains.push_back(*d);
        }
    }
    if (t.domains.empty()) t.domains.push_back(s.gui.active_domain);
    std::vector<ScreenStep> steps = std::move(s.action_log);
    steps.push_back(current_step(s.gui));
    t.screen_annotation = std::move(steps);
    s.history.push_back(std::move(t));
    s.action_log.clear();
    s.pending_user.reset();
}

}  // namespace

SessionState make_session(kb::DatabasePtr db, ServeOptions options) {
    SessionState s;
    s.db = std::move(db);
    s.options = std::move(options);
    return s;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < bytes.size(); i += 3) {
        const std::uint32_t n = (static_cast<std::uint32_t>(bytes[i]) << 16) |
                                (i + 1 < bytes.size() ? static_cast<std::uint32_t>(bytes[i + 1]) << 8 : 0u) |
                                (i + 2 < bytes.size() ? static_cast<std::uint32_t>(bytes[i + 2]) : 0u);
        out.push_back(kAlphabet[(n >> 18) & 63]);
        out.push_back(kAlphabet[(n >> 12) & 63]);
        out.push_back(i + 1 < bytes.size() ? kAlphabet[(n >> 6) & 63] : '=');
        out.push_back(i + 2 < bytes.size() ? kAlphabet[n & 63] : '=');
    }
    return out;
}

Json layout_export(const layout::Layout& layout) {
    Json elements = Json::array();
    for (const auto& e : layout.elements) {
        elements.push_back(Json{{"id", e.id},
                                {"bbox", bbox_to_json(e.bbox)},
                                {"kind", std::string(to_string(e.kind))},
                                {"role", std::string(to_string(e.role))},
                                {"text", e.text},
                                {"checked", e.checked}});
    }
    return elements;
}

Json observe(const SessionState& s) {
    if (!s.open) throw ProtocolError("no open session; send reset");
    const auto lay = layout::current_layout(s.gui);
    const auto snap = render::snapshot(s.gui, lay, false);
    Json text = Json::array();
    for (const auto& line : snap.text_dump) text.push_back(line.text);
    Json obs = Json::object();
    obs["session_id"] = s.gui.session_id;
    obs["dialogue_id"] = s.gui.dialogue_id;
    obs["turn_index"] = s.gui.turn_index;
    obs["active_domain"] = std::string(to_string(s.gui.active_domain));
    obs["state_digest"] = to_hex64(snap.state_digest);
    obs["text"] = text;
    obs["elements"] = layout_export(lay);
    if (s.images == ImageMode::path) {
        const auto path = s.options.output_dir / (snapshot_stem(s) + ".png");
        render::write_png(path, render::rasterize(lay));
        obs["snapshot"] = path.string();
    } else if (s.images == ImageMode::base64) {
        obs["png_base64"] = base64_encode(render::encode_png(render::rasterize(lay)));
    }
    return obs;
}

MmwozDialogue record_trajectory(const SessionState& s) {
    return MmwozDialogue{s.gui.dialogue_id, s.history};
}

std::pair<SessionState, Json> handle(const SessionState& session, const Json& message) {
    try {
        if (!message.is_object() || !message.contains("kind") || !message["kind"].is_string()) {
            throw ProtocolError("message must be an object with a string 'kind'");
        }
        const std::string kind = message["kind"].get<std::string>();
        SessionState next = session;
        if (kind == "reset") {
            on_reset(next, message);
        } else {
            if (!session.open) throw ProtocolError("no open session; send reset");
            if (kind == "user_say") on_user_say(next, message);
            else if (kind == "act") on_act(next, message);
            else if (kind == "respond") on_respond(next, message);
            else if (kind == "observe") {
            } else if (kind == "close") {
                const Json trajectory = dialogue_to_json(record_trajectory(next));
                Json reply{{"ok", true}, {"trajectory", trajectory}};
                if (message.contains("path")) {
                    const std::filesystem::path path = require_text(message, "path");
                    write_json_file(path, trajectory);
                    reply["path"] = path.string();
                }
                next.open = false;
                return {std::move(next), std::move(reply)};
            } else {
                throw ProtocolError("unknown message kind '" + kind + "'");
            }
        }
        Json reply{{"ok", true}, {"observation", observe(next)}};
        return {std::move(next), std::move(reply)};
    } catch (const Error& e) {
        return {session, error_reply(e.code(), e.what())};
    } catch (const Json::exception& e) {
        return {session, error_reply("ProtocolError", e.what())};
    }
}

std::pair<SessionState, Json> handle_line(const SessionState& session, const std::string& line) {
    Json message;
    try {
        message = Json::parse(line);
    } catch (const Json::parse_error& e) {
        return {session, error_reply("ProtocolError", std::string("malformed JSON: ") + e.what())};
    }
    return handle(session, message);
}

}  // namespace mmwoz::serve
