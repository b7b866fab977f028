#pragma once

// Line-delimited JSON session protocol. Requests:
//   {"kind": "reset", "dialogue_id"?: str, "session_id"?: str, "images"?: "none"|"path"|"base64"}
//   {"kind": "user_say", "text": str}
//   {"kind": "act", "op": {"op": "click"|"input", "bbox": [x1, y1, x2, y2], "value"?: str}}
//   {"kind": "respond", "text": str}
//   {"kind": "observe"}
//   {"kind": "close", "path"?: str}
// Replies:
//   {"ok": true, "observation": {...}}            (close: {"ok": true, "trajectory": {...}})
//   {"ok": false, "error": {"type": str, "message": str}}
// An observation carries the text dump, the element inventory and, depending on
// the session's image mode, a PNG path or base64 payload.

#include "mmwoz/annotation.hpp"
#include "mmwoz/gui.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/layout.hpp"
#include "mmwoz/state.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmwoz::serve {

enum class ImageMode : std::uint8_t { none, path, base64 };

struct ServeOptions {
    LayoutConfig layout;
    /// Where PNG snapshots go in ImageMode::path, and trajectories on close.
    std::filesystem::path output_dir = ".";
};

struct SessionState {
    kb::DatabasePtr db;
    ServeOptions options;
    bool open = false;
    ImageMode images = ImageMode::none;
    gui::GuiState gui;
    /// Committed turns (dialogue history with the system turns' screen annotation).
    std::vector<MmwozTurn> history;
    /// Observation/operation steps of the system turn in progress.
    std::vector<ScreenStep> action_log;
    /// User utterance awaiting the system response.
    std::optional<std::string> pending_user;
};

SessionState make_session(kb::DatabasePtr db, ServeOptions options);

/// Applies one message. On any error the returned state equals `session` and
/// the reply is an error reply.
std::pair<SessionState, Json> handle(const SessionState& session, const Json& message);
/// Parses one protocol line first; malformed JSON gives a ProtocolError reply.
std::pair<SessionState, Json> handle_line(const SessionState& session, const std::string& line);

/// Deterministic element list of a layout: [{id, bbox, kind, role, text, checked}, ...]
/// in layout order. This is what the wizard UI draws.
Json layout_export(const layout::Layout& layout);

/// Observation of the live state.
Json observe(const SessionState& session);

/// The recorded dialogue, in annotation-file form.
MmwozDialogue record_trajectory(const SessionState& session);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace mmwoz::serve
