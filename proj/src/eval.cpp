#include "mmwoz/eval.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/gui.hpp"
#include "mmwoz/text.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace mmwoz::eval {
namespace {

double pct(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::optional<std::string> resolve(const std::vector<std::pair<std::string, BBox>>& inventory, Point p) {
    for (const auto& [id, b] : inventory) {
        if (b.contains(p)) return id;
    }
    return std::nullopt;
}

bool same_value(const OperationInstruction& a, const OperationInstruction& b) {
    if (a.value.has_value() != b.value.has_value()) return false;
    return !a.value || text::normalize_value(*a.value) == text::normalize_value(*b.value);
}

using NgramCounts = std::map<std::string, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, std::size_t n) {
    NgramCounts out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) {
            if (k) key.push_back('\x1f');
            key += toks[i + k];
        }
        ++out[key];
    }
    return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Position of `needle` in `hay` at or after `from`, on word boundaries.
std::size_t find_word(const std::string& hay, const std::string& needle, std::size_t from) {
    if (needle.empty()) return std::string::npos;
    for (std::size_t pos = hay.find(needle, from); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        const std::size_t end = pos + needle.size();
        const bool left = pos == 0 || !is_word_char(hay[pos - 1]) || !is_word_char(needle.front());
        const bool right = end >= hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
        if (left && right) return pos;
    }
    return std::string::npos;
}

PredictedStep step_from_json(const Json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("action_type") || !j["action_type"].is_string()) {
        throw SchemaError(where + ": step needs an action_type");
    }
    PredictedStep s;
    const std::string type = j["action_type"].get<std::string>();
    if (type == "operate") {
        s.action_type = ActionType::operate;
        if (!j.contains("operations") || !j["operations"].is_array() || j["operations"].empty()) {
            throw SchemaError(where + ": operate step needs a non-empty 'operations' array");
        }
        if (j.contains("response")) throw SchemaError(where + ": operate step carries a response");
        for (const auto& op : j["operations"]) {
            try {
                s.operations.push_back(operation_from_json(op));
            } catch (const SchemaError& e) {
                throw SchemaError(where + ": " + e.what());
            }
        }
    } else if (type == "respond") {
        s.action_type = ActionType::respond;
        if (!j.contains("response") || !j["response"].is_string()) {
            throw SchemaError(where + ": respond step needs a 'response' string");
        }
        if (j.contains("operations")) throw SchemaError(where + ": respond step carries operations");
        s.response = j["response"].get<std::string>();
    } else {
        throw SchemaError(where + ": unknown action_type '" + type + "'");
    }
    return s;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex mu;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::string turn_key(const std::string& id, int turn) { return id + "#" + std::to_string(turn); }

}  // namespace

std::string_view to_string(ActionType t) { return t == ActionType::operate ? "operate" : "respond"; }

BleuStats& BleuStats::operator+=(const BleuStats& o) {
    for (std::size_t n = 0; n < 4; ++n) {
        matches[n] += o.matches[n];
        totals[n] += o.totals[n];
    }
    hyp_length += o.hyp_length;
    ref_length += o.ref_length;
    return *this;
}

BleuStats bleu_stats(const std::string& hypothesis, const std::string& reference) {
    const auto hyp = text::split_whitespace(text::lower(hypothesis));
    const auto ref = text::split_whitespace(text::lower(reference));
    BleuStats s;
    s.hyp_length = hyp.size();
    s.ref_length = ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto h = ngrams(hyp, n);
        const auto r = ngrams(ref, n);
        for (const auto& [g, c] : h) {
            s.totals[n - 1] += c;
            if (auto it = r.find(g); it != r.end()) s.matches[n - 1] += std::min(c, it->second);
        }
    }
    return s;
}

double bleu_score(const BleuStats& s) {
    if (s.totals[0] == 0 || s.matches[0] == 0) return 0.0;
    double log_sum = std::log(static_cast<double>(s.matches[0]) / static_cast<double>(s.totals[0]));
    for (std::size_t n = 1; n < 4; ++n) {
        log_sum += std::log((static_cast<double>(s.matches[n]) + 1.0) / (static_cast<double>(s.totals[n]) + 1.0));
    }
    const double c = static_cast<double>(s.hyp_length);
    const double r = static_cast<double>(s.ref_length);
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return 100.0 * bp * std::exp(log_sum / 4.0);
}

double bleu(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses) {
    BleuStats total;
    for (std::size_t i = 0; i < references.size(); ++i) {
        total += bleu_stats(i < hypotheses.size() ? hypotheses[i] : std::string{}, references[i]);
    }
    return bleu_score(total);
}

Tally& Tally::operator+=(const Tally& o) {
    steps += o.steps;
    steps_ok += o.steps_ok;
    operations += o.operations;
    location_exact_ok += o.location_exact_ok;
    location_hit_ok += o.location_hit_ok;
    command_ok += o.command_ok;
    operate_steps += o.operate_steps;
    snapshot_ok += o.snapshot_ok;
    operate_turns += o.operate_turns;
    turn_ok += o.turn_ok;
    entity_turns += o.entity_turns;
    entity_turn_ok += o.entity_turn_ok;
    entities += o.entities;
    entity_ok += o.entity_ok;
    responses += o.responses;
    bleu += o.bleu;
    return *this;
}

Tally score_turn(const GoldTurn& gold, const PredictedTurn* pred, const EvalOptions& options) {
    Tally t;
    static const std::vector<PredictedStep> kNone;
    const auto& psteps = pred ? pred->steps : kNone;
    bool has_ops = false;
    bool all_ok = true;
    std::string response;
    std::string gold_response;
    for (std::size_t k = 0; k < gold.steps.size(); ++k) {
        const GoldStep& g = gold.steps[k];
        const PredictedStep* p = k < psteps.size() ? &psteps[k] : nullptr;
        ++t.steps;
        if (p && p->action_type == g.action_type) ++t.steps_ok;
        if (g.action_type == ActionType::respond) {
            gold_response = g.response;
            if (p && p->action_type == ActionType::respond) response = p->response;
            continue;
        }
        has_ops = true;
        ++t.operate_steps;
        const bool operate = p && p->action_type == ActionType::operate;
        bool group_ok = operate && p->operations.size() == g.operations.size();
        for (std::size_t j = 0; j < g.operations.size(); ++j) {
            const OperationInstruction& go = g.operations[j];
            const OperationInstruction* po = operate && j < p->operations.size() ? &p->operations[j] : nullptr;
            ++t.operations;
            const bool exact = po && po->bbox == go.bbox;
            bool hit = exact;
            if (po && !hit) {
                const auto want = resolve(g.inventory, go.bbox.center());
                hit = want && want == resolve(g.inventory, po->bbox.center());
            }
            if (exact) ++t.location_exact_ok;
            if (hit) ++t.location_hit_ok;
            const bool location = options.location_mode == LocationMode::exact ? exact : hit;
            const bool command = location && po->kind == go.kind && same_value(*po, go);
            if (command) ++t.command_ok;
            else group_ok = false;
        }
        if (group_ok) ++t.snapshot_ok;
        else all_ok = false;
    }
    if (has_ops) {
        ++t.operate_turns;
        if (all_ok) ++t.turn_ok;
    }

    ++t.responses;
    t.bleu = bleu_stats(response, gold_response);

    const std::string normalized = text::normalize_for_match(response);
    std::size_t found = 0;
    for (const auto& m : gold.mentions) {
        if (normalized.find(text::normalize_for_match(m.value)) != std::string::npos) ++found;
    }
    if (!gold.mentions.empty()) {
        ++t.entity_turns;
        if (found == gold.mentions.size()) ++t.entity_turn_ok;
        t.entities += gold.mentions.size();
        t.entity_ok += found;
    }
    return t;
}

MetricReport report_from_tally(const Tally& t, const EvalOptions& options) {
    MetricReport r;
    r.options = options;
    r.tally = t;
    r.action_type_acc = pct(t.steps_ok, t.steps);
    r.location_acc_exact = pct(t.location_exact_ok, t.operations);
    r.location_acc_hit_test = pct(t.location_hit_ok, t.operations);
    r.location_acc = options.location_mode == LocationMode::exact ? r.location_acc_exact : r.location_acc_hit_test;
    r.command_acc = pct(t.command_ok, t.operations);
    r.snapshot_joint_acc = pct(t.snapshot_ok, t.operate_steps);
    r.turn_joint_acc = pct(t.turn_ok, t.operate_turns);
    r.entity_acc = options.entity_micro ? pct(t.entity_ok, t.entities) : pct(t.entity_turn_ok, t.entity_turns);
    r.bleu = bleu_score(t.bleu);
    return r;
}

Json MetricReport::to_json() const {
    Json j = Json::object();
    j["action_type_acc"] = action_type_acc;
    j["location_acc"] = location_acc;
    j["command_acc"] = command_acc;
    j["snapshot_joint_acc"] = snapshot_joint_acc;
    j["turn_joint_acc"] = turn_joint_acc;
    j["entity_acc"] = entity_acc;
    j["bleu"] = bleu;
    j["location_acc_exact"] = location_acc_exact;
    j["location_acc_hit_test"] = location_acc_hit_test;
    j["location_mode"] = options.location_mode == LocationMode::exact ? "exact" : "hit_test";
    j["entity_granularity"] = options.entity_micro ? "entity" : "turn";
    j["references"] = options.references;
    j["denominators"] = Json{{"turns", turns},
                             {"predicted_turns", predicted_turns},
                             {"steps", tally.steps},
                             {"operations", tally.operations},
                             {"operate_steps", tally.operate_steps},
                             {"operate_turns", tally.operate_turns},
                             {"entity_turns", tally.entity_turns},
                             {"entities", tally.entities},
                             {"responses", tally.responses}};
    if (closed_loop_acc) j["closed_loop"] = Json{{"turn_acc", *closed_loop_acc}, {"turns", closed_loop_turns}};
    return j;
}

namespace {

Tally score_all(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred, const EvalOptions& o) {
    std::map<std::string, const PredictedTurn*> index;
    for (const auto& p : pred) index[turn_key(p.dialogue_id, p.turn_index)] = &p;
    Tally t;
    for (const auto& g : gold) {
        auto it = index.find(turn_key(g.dialogue_id, g.turn_index));
        t += score_turn(g, it == index.end() ? nullptr : it->second, o);
    }
    return t;
}

}  // namespace

double action_type_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred) {
    const Tally t = score_all(gold, pred, {});
    return pct(t.steps_ok, t.steps);
}

OperationAccuracy operation_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred,
                                     LocationMode mode) {
    EvalOptions o;
    o.location_mode = mode;
    const MetricReport r = report_from_tally(score_all(gold, pred, o), o);
    return {r.location_acc, r.command_acc, r.snapshot_joint_acc, r.turn_joint_acc};
}

double entity_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred, bool micro) {
    EvalOptions o;
    o.entity_micro = micro;
    return report_from_tally(score_all(gold, pred, o), o).entity_acc;
}

std::string augment_with_references(const std::string& response, const std::vector<EntityMention>& mentions,
                                    const layout::Layout& layout) {
    std::string out = response;
    std::size_t cursor = 0;
    for (const auto& m : mentions) {
        const Element* e = m.element_id ? layout.find(*m.element_id) : nullptr;
        if (!e) {
            throw UnresolvedMentionError("mention '" + m.value + "' has no element" +
                                         (m.element_id ? " '" + *m.element_id + "' in the layout" : ""));
        }
        const std::string suffix = " " + format_bbox(e->bbox);
        const std::size_t pos = find_word(text::lower(out), text::lower(m.value), cursor);
        if (pos == std::string::npos) continue;
        const std::size_t end = pos + m.value.size();
        if (out.compare(end, suffix.size(), suffix) != 0) out.insert(end, suffix);
        cursor = end + suffix.size();
    }
    return out;
}

std::vector<GoldTurn> gold_turns(const MmwozDialogue& dialogue, bool references) {
    std::vector<GoldTurn> out;
    for (const auto& t : dialogue.turns) {
        if (t.speaker != Speaker::system || !t.screen_annotation) continue;
        GoldTurn g;
        g.dialogue_id = dialogue.dialogue_id;
        g.turn_index = t.turn_index;
        g.mentions = t.entity_mentions;
        const auto& steps = *t.screen_annotation;
        for (const auto& s : steps) {
            if (s.operations.empty()) continue;
            g.steps.push_back({ActionType::operate, s.operations, {}, s.interactive});
        }
        std::string response = t.utterance;
        if (references) {
            layout::Layout located;
            std::vector<EntityMention> usable;
            for (const auto& m : t.entity_mentions) {
                if (!m.element_id || !m.bbox) continue;
                usable.push_back(m);
                if (!located.find(*m.element_id)) {
                    located.elements.push_back({*m.element_id, *m.bbox, ElementKind::noninteractive,
                                                ElementRole::info, m.value, false});
                }
            }
            response = augment_with_references(response, usable, located);
        }
        GoldStep respond;
        respond.action_type = ActionType::respond;
        respond.response = std::move(response);
        if (!steps.empty()) respond.inventory = steps.back().interactive;
        g.steps.push_back(std::move(respond));
        g.final_digest = steps.empty() ? 0 : steps.back().state_digest;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<PredictedTurn> gold_as_predictions(const std::vector<GoldTurn>& gold) {
    std::vector<PredictedTurn> out;
    for (const auto& g : gold) {
        PredictedTurn p{g.dialogue_id, g.turn_index, {}};
        for (const auto& s : g.steps) p.steps.push_back({s.action_type, s.operations, s.response});
        out.push_back(std::move(p));
    }
    return out;
}

Json predicted_turn_to_json(const PredictedTurn& t) {
    Json steps = Json::array();
    for (const auto& s : t.steps) {
        Json js = Json::object();
        js["action_type"] = std::string(to_string(s.action_type));
        if (s.action_type == ActionType::operate) {
            Json ops = Json::array();
            for (const auto& op : s.operations) ops.push_back(operation_to_json(op));
            js["operations"] = ops;
        } else {
            js["response"] = s.response;
        }
        steps.push_back(js);
    }
    return Json{{"dialogue_id", t.dialogue_id}, {"turn_index", t.turn_index}, {"steps", steps}};
}

std::vector<PredictedTurn> parse_predictions(std::istream& in) {
    std::vector<PredictedTurn> out;
    std::set<std::string> seen;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (text::trim(line).empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw SchemaError(where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("dialogue_id") || !j["dialogue_id"].is_string() ||
            !j.contains("turn_index") || !j["turn_index"].is_number_integer() || !j.contains("steps") ||
            !j["steps"].is_array()) {
            throw SchemaError(where + ": expected {dialogue_id, turn_index, steps}");
        }
        PredictedTurn t{j["dialogue_id"].get<std::string>(), j["turn_index"].get<int>(), {}};
        if (!seen.insert(turn_key(t.dialogue_id, t.turn_index)).second) {
            throw SchemaError(where + ": duplicate prediction for " + t.dialogue_id + " turn " +
                              std::to_string(t.turn_index));
        }
        for (const auto& s : j["steps"]) t.steps.push_back(step_from_json(s, where));
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<PredictedTurn> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_predictions(in);
}

void write_predictions(const std::filesystem::path& path, const std::vector<PredictedTurn>& preds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& p : preds) out << predicted_turn_to_json(p).dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
}

MetricReport evaluate(const dataset::Dataset& gold, const std::vector<PredictedTurn>& preds,
                      const EvalOptions& options) {
    std::map<std::string, const PredictedTurn*> index;
    for (const auto& p : preds) index[turn_key(p.dialogue_id, p.turn_index)] = &p;

    const std::size_t n = gold.dialogues.size();
    std::vector<Tally> tallies(n);
    std::vector<std::size_t> turns(n), matched(n);
    parallel_for(n, [&](std::size_t i) {
        for (const auto& g : gold_turns(gold.dialogues[i], options.references)) {
            auto it = index.find(turn_key(g.dialogue_id, g.turn_index));
            const PredictedTurn* p = it == index.end() ? nullptr : it->second;
            tallies[i] += score_turn(g, p, options);
            ++turns[i];
            if (p) ++matched[i];
        }
    });
    Tally total;
    MetricReport r;
    for (std::size_t i = 0; i < n; ++i) {
        total += tallies[i];
        r.turns += turns[i];
        r.predicted_turns += matched[i];
    }
    const std::size_t t = r.turns;
    const std::size_t m = r.predicted_turns;
    r = report_from_tally(total, options);
    r.turns = t;
    r.predicted_turns = m;
    return r;
}

std::pair<std::size_t, std::size_t> closed_loop(const dataset::Dataset& gold, const std::vector<PredictedTurn>& preds,
                                                kb::DatabasePtr db) {
    std::map<std::string, const PredictedTurn*> index;
    for (const auto& p : preds) index[turn_key(p.dialogue_id, p.turn_index)] = &p;
    const LayoutConfig config = dataset::layout_from_manifest(gold.manifest);

    const std::size_t n = gold.dialogues.size();
    std::vector<std::size_t> correct(n), total(n);
    parallel_for(n, [&](std::size_t i) {
        const MmwozDialogue& d = gold.dialogues[i];
        gui::GuiState s = gui::new_session(db, d.dialogue_id, config);
        for (const auto& t : d.turns) {
            if (t.speaker != Speaker::system || !t.screen_annotation || t.screen_annotation->empty()) continue;
            s.turn_index = t.turn_index;
            ++total[i];
            const std::uint64_t target = t.screen_annotation->back().state_digest;
            auto it = index.find(turn_key(d.dialogue_id, t.turn_index));
            gui::GuiState trial = s;
            bool ok = true;
            if (it != index.end()) {
                try {
                    for (const auto& step : it->second->steps) {
                        for (const auto& op : step.operations) trial = gui::apply_operation(trial, op);
                    }
                } catch (const Error&) {
                    ok = false;
                }
            }
            if (ok && gui::state_digest(trial) == target) ++correct[i];
            // Continue from the gold trajectory.
            for (const auto& step : *t.screen_annotation) {
                for (const auto& op : step.operations) s = gui::apply_operation(s, op);
            }
        }
    });
    std::size_t c = 0, tt = 0;
    for (std::size_t i = 0; i < n; ++i) {
        c += correct[i];
        tt += total[i];
    }
    return {c, tt};
}

bool corrupt_single_operation(std::vector<PredictedTurn>& preds, SplitMix64& rng) {
    std::vector<OperationInstruction*> ops;
    for (auto& t : preds) {
        for (auto& s : t.steps) {
            for (auto& op : s.operations) ops.push_back(&op);
        }
    }
    if (ops.empty()) return false;
    OperationInstruction& op = *ops[rng.next() % ops.size()];
    switch (rng.uniform(0, 2)) {
        case 0: {
            int dx = 0, dy = 0;
            while (dx == 0 && dy == 0) {
                dx = rng.uniform(-60, 60);
                dy = rng.uniform(-60, 60);
            }
            op.bbox = op.bbox.translated(dx, dy);
            break;
        }
        case 1:
            if (op.kind == OpKind::input) {
                op.value = *op.value + " corrupted";
                break;
            }
            [[fallthrough]];
        default:
            if (op.kind == OpKind::click) {
                op.kind = OpKind::input;
                op.value = "corrupted";
            } else {
                op.kind = OpKind::click;
                op.value.reset();
            }
            break;
    }
    return true;
}

}  // namespace mmwoz::eval
