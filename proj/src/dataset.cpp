#include "mmwoz/dataset.hpp"

#include "mmwoz/errors.hpp"
#include "mmwoz/gui.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/render.hpp"
#include "mmwoz/text.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace mmwoz::dataset {
namespace {

constexpr std::string_view kMentionSlots[] = {"name", "address", "postcode", "phone", "ref", "id", "car"};

bool token_contains(const std::string& haystack, const std::string& needle) {
    return (" " + haystack + " ").find(" " + needle + " ") != std::string::npos;
}

std::string snapshot_name(const std::string& id, int turn, std::size_t k) {
    return id + "_" + std::to_string(turn) + "_" + std::to_string(k) + ".png";
}

ScreenStep make_step(const render::Snapshot& snap, std::vector<OperationInstruction> ops,
                     std::optional<std::string> path, bool embed_text) {
    ScreenStep step;
    step.snapshot = std::move(path);
    step.state_digest = snap.state_digest;
    for (const Element* e : snap.elements.interactive()) step.interactive.emplace_back(e->id, e->bbox);
    if (embed_text) {
        step.text.emplace();
        for (const auto& line : snap.text_dump) step.text->push_back(line.text);
    }
    step.operations = std::move(ops);
    return step;
}

void ensure_dirs(const std::filesystem::path& out, bool images) {
    std::error_code ec;
    std::filesystem::create_directories(out / "dialogues", ec);
    if (images) std::filesystem::create_directories(out / "images", ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
}

/// Writes one dialogue's annotation (and PNGs) and returns its counts.
Counts write_dialogue(const std::filesystem::path& out, const RawDialogue& raw,
                      const compiler::CompiledDialogue& compiled, const EmitSettings& settings) {
    const MmwozDialogue ann = annotate(raw, compiled, settings.images, settings.embed_text);
    write_json_file(out / "dialogues" / (ann.dialogue_id + ".json"), dialogue_to_json(ann));
    if (settings.images) {
        for (const auto& t : compiled.turns) {
            std::vector<const render::Snapshot*> snaps{&t.snapshot_before};
            for (const auto& g : t.groups) snaps.push_back(&g.snapshot_after);
            for (std::size_t k = 0; k < snaps.size(); ++k) {
                const auto path = out / "images" / snapshot_name(compiled.dialogue_id, t.turn_index, k);
                render::write_png(path, render::rasterize(snaps[k]->elements));
            }
        }
    }
    return count(ann);
}

Json layout_json(const LayoutConfig& c) {
    return Json{{"width", c.width}, {"height", c.height}, {"perturb", std::string(to_string(c.perturb_mode))},
                {"seed", c.seed}};
}

Json build_manifest(const std::vector<std::string>& ids, const Counts& counts, std::vector<Exclusion> excluded,
                    const std::map<std::string, std::set<Domain>>& domains, const EmitSettings& settings) {
    std::sort(excluded.begin(), excluded.end(),
              [](const Exclusion& a, const Exclusion& b) { return a.dialogue_id < b.dialogue_id; });
    Json ex = Json::array();
    for (const auto& e : excluded) {
        ex.push_back({{"dialogue_id", e.dialogue_id}, {"turn_index", e.turn_index}, {"reason", e.reason}});
    }
    Json doms = Json::object();
    for (const auto& [id, ds] : domains) {
        Json list = Json::array();
        for (Domain d : ds) list.push_back(std::string(to_string(d)));
        doms[id] = list;
    }
    Json m = Json::object();
    m["format"] = kFormat;
    m["dialogues"] = ids;
    m["counts"] = counts.to_json();
    m["excluded"] = ex;
    m["out_of_scope"] = settings.out_of_scope;
    m["layout"] = layout_json(settings.layout);
    m["database"] = settings.database;
    m["images"] = settings.images;
    m["official_splits"] = Json{{"dev", settings.dev_ids}, {"test", settings.test_ids}};
    m["dialogue_domains"] = doms;
    return m;
}

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

Json compare(double value, double reference) {
    return Json{{"value", value}, {"reference", reference}, {"relative_deviation", ratio(value - reference, reference)}};
}

}  // namespace

Counts& Counts::operator+=(const Counts& o) {
    dialogues += o.dialogues;
    utterances += o.utterances;
    system_turns += o.system_turns;
    snapshots += o.snapshots;
    instructions += o.instructions;
    clicks += o.clicks;
    inputs += o.inputs;
    for (const auto& [d, c] : o.per_domain) {
        per_domain[d].click += c.click;
        per_domain[d].input += c.input;
    }
    return *this;
}

Json Counts::to_json() const {
    Json per = Json::object();
    for (const auto& [d, c] : per_domain) per[d] = Json{{"click", c.click}, {"input", c.input}};
    return Json{{"dialogues", dialogues}, {"utterances", utterances},   {"system_turns", system_turns},
                {"snapshots", snapshots}, {"instructions", instructions}, {"clicks", clicks},
                {"inputs", inputs},       {"per_domain", per}};
}

Counts Counts::from_json(const Json& j) {
    Counts c;
    c.dialogues = j.at("dialogues").get<std::size_t>();
    c.utterances = j.at("utterances").get<std::size_t>();
    c.system_turns = j.at("system_turns").get<std::size_t>();
    c.snapshots = j.at("snapshots").get<std::size_t>();
    c.instructions = j.at("instructions").get<std::size_t>();
    c.clicks = j.at("clicks").get<std::size_t>();
    c.inputs = j.at("inputs").get<std::size_t>();
    for (const auto& [d, v] : j.at("per_domain").items()) {
        c.per_domain[d] = {v.at("click").get<std::size_t>(), v.at("input").get<std::size_t>()};
    }
    return c;
}

std::string operation_domain(const OperationInstruction& op) {
    const std::string& id = op.element_id;
    if (text::starts_with(id, "menu.")) return id.substr(5);
    const auto dot = id.find('.');
    const std::string head = id.substr(0, dot);
    return parse_domain(head) ? head : "unknown";
}

Counts count(const MmwozDialogue& d) {
    Counts c;
    c.dialogues = 1;
    c.utterances = d.turns.size();
    for (const auto& t : d.turns) {
        if (t.speaker != Speaker::system || !t.screen_annotation) continue;
        ++c.system_turns;
        c.snapshots += t.screen_annotation->size();
        for (const auto& step : *t.screen_annotation) {
            for (const auto& op : step.operations) {
                ++c.instructions;
                auto& pd = c.per_domain[operation_domain(op)];
                if (op.kind == OpKind::click) {
                    ++c.clicks;
                    ++pd.click;
                } else {
                    ++c.inputs;
                    ++pd.input;
                }
            }
        }
    }
    return c;
}

std::vector<EntityMention> entity_mentions(const RawTurn& turn, const layout::Layout& final_layout) {
    std::vector<EntityMention> out;
    const std::string utterance = text::normalize_for_match(turn.utterance);
    std::set<std::string> seen;
    for (const auto& act : turn.acts.acts) {
        if (std::find(std::begin(kMentionSlots), std::end(kMentionSlots), act.slot) == std::end(kMentionSlots)) {
            continue;
        }
        if (compiler::is_void_value(act.value)) continue;
        const std::string value = text::normalize_for_match(act.value);
        if (value.empty() || !token_contains(utterance, value) || !seen.insert(value).second) continue;

        EntityMention m{text::normalize_value(act.value), act.slot, std::nullopt, std::nullopt};
        const Element* best = nullptr;
        int best_rank = 3;
        for (const auto& e : final_layout.elements) {
            const std::string t = text::normalize_for_match(e.text);
            int rank = 3;
            if (t == value) rank = 0;
            else if (t.ends_with(" " + value)) rank = 1;
            else if (token_contains(t, value)) rank = 2;
            if (rank < best_rank) {
                best = &e;
                best_rank = rank;
            }
        }
        if (best) {
            m.element_id = best->id;
            m.bbox = best->bbox;
        }
        out.push_back(std::move(m));
    }
    return out;
}

MmwozDialogue annotate(const RawDialogue& raw, const compiler::CompiledDialogue& compiled, bool images,
                       bool embed_text) {
    MmwozDialogue d;
    d.dialogue_id = raw.dialogue_id;
    std::map<int, const compiler::CompiledTurn*> by_index;
    for (const auto& t : compiled.turns) by_index[t.turn_index] = &t;
    for (std::size_t i = 0; i < raw.turns.size(); ++i) {
        const RawTurn& rt = raw.turns[i];
        MmwozTurn t;
        t.turn_index = static_cast<int>(i);
        t.speaker = rt.speaker;
        t.utterance = rt.utterance;
        if (rt.speaker == Speaker::system) {
            auto it = by_index.find(t.turn_index);
            if (it == by_index.end()) throw SchemaError(raw.dialogue_id + ": turn " + std::to_string(i) + " not compiled");
            const compiler::CompiledTurn& ct = *it->second;
            t.domains = ct.domains;
            auto path = [&](std::size_t k) -> std::optional<std::string> {
                if (!images) return std::nullopt;
                return "images/" + snapshot_name(raw.dialogue_id, ct.turn_index, k);
            };
            std::vector<ScreenStep> steps;
            const render::Snapshot* obs = &ct.snapshot_before;
            for (std::size_t k = 0; k < ct.groups.size(); ++k) {
                steps.push_back(make_step(*obs, ct.groups[k].operations, path(k), embed_text));
                obs = &ct.groups[k].snapshot_after;
            }
            steps.push_back(make_step(*obs, {}, path(ct.groups.size()), embed_text));
            t.screen_annotation = std::move(steps);
            t.entity_mentions = entity_mentions(rt, ct.final_snapshot().elements);
        }
        d.turns.push_back(std::move(t));
    }
    return d;
}

Json emit_mmwoz(const std::vector<EmitItem>& items, const std::vector<Exclusion>& excluded,
                const std::filesystem::path& out, const EmitSettings& settings) {
    ensure_dirs(out, settings.images);
    std::vector<const EmitItem*> ordered;
    for (const auto& it : items) ordered.push_back(&it);
    std::sort(ordered.begin(), ordered.end(),
              [](const EmitItem* a, const EmitItem* b) { return a->raw->dialogue_id < b->raw->dialogue_id; });
    Counts total;
    std::vector<std::string> ids;
    std::map<std::string, std::set<Domain>> domains;
    for (const EmitItem* it : ordered) {
        total += write_dialogue(out, *it->raw, it->compiled, settings);
        ids.push_back(it->raw->dialogue_id);
        domains[it->raw->dialogue_id] = it->raw->domains;
    }
    Json manifest = build_manifest(ids, total, excluded, domains, settings);
    write_json_file(out / "manifest.json", manifest);
    return manifest;
}

Json compile_corpus(const MultiwozCorpus& corpus, kb::DatabasePtr db, const std::filesystem::path& out,
                    const EmitSettings& settings, unsigned threads) {
    ensure_dirs(out, settings.images);
    const std::size_t n = corpus.dialogues.size();
    std::vector<std::optional<Counts>> counts(n);
    std::vector<std::optional<Exclusion>> failures(n);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr io_failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const RawDialogue& raw = corpus.dialogues[i];
            try {
                auto outcome =
                    compiler::compile_dialogue(raw.dialogue_id, raw.system_turns(), db, settings.layout, {});
                if (auto* bad = std::get_if<compiler::Uncompilable>(&outcome)) {
                    failures[i] = Exclusion{raw.dialogue_id, bad->turn_index, bad->reason};
                    continue;
                }
                counts[i] = write_dialogue(out, raw, std::get<compiler::CompiledDialogue>(outcome), settings);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!io_failure) io_failure = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (io_failure) std::rethrow_exception(io_failure);

    Counts total;
    std::vector<std::string> ids;
    std::vector<Exclusion> excluded;
    std::map<std::string, std::set<Domain>> domains;
    for (std::size_t i = 0; i < n; ++i) {
        if (failures[i]) {
            excluded.push_back(*failures[i]);
            continue;
        }
        total += *counts[i];
        ids.push_back(corpus.dialogues[i].dialogue_id);
        domains[ids.back()] = corpus.dialogues[i].domains;
    }
    Json manifest = build_manifest(ids, total, excluded, domains, settings);
    write_json_file(out / "manifest.json", manifest);
    return manifest;
}

LayoutConfig layout_from_manifest(const Json& manifest) {
    LayoutConfig c;
    const Json& l = manifest.at("layout");
    c.width = l.at("width").get<int>();
    c.height = l.at("height").get<int>();
    const auto mode = parse_perturb_mode(l.at("perturb").get<std::string>());
    if (!mode) throw SchemaError("manifest: unknown perturb mode");
    c.perturb_mode = *mode;
    c.seed = l.at("seed").get<std::uint64_t>();
    return c;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    Dataset data;
    data.root = dir;
    data.manifest = read_json_file(dir / "manifest.json");
    if (!data.manifest.is_object() || data.manifest.value("format", "") != kFormat) {
        throw SchemaError((dir / "manifest.json").string() + ": not an mmwoz manifest");
    }
    for (const auto& id : data.manifest.at("dialogues")) {
        data.dialogues.push_back(read_dialogue_file(dir / "dialogues" / (id.get<std::string>() + ".json")));
    }
    return data;
}

Splits make_splits(const std::vector<std::string>& ids, const SplitSpec& spec,
                   const std::map<std::string, std::set<Domain>>& dialogue_domains) {
    std::set<std::string> unique;
    for (const auto& id : ids) {
        if (!unique.insert(id).second) throw UnknownIdError("duplicate dialogue id " + id);
    }
    const std::set<std::string> dev(spec.dev.begin(), spec.dev.end());
    const std::set<std::string> test(spec.test.begin(), spec.test.end());
    const bool official = !dev.empty() || !test.empty();

    auto touches_excluded = [&](const std::string& id) {
        auto it = dialogue_domains.find(id);
        if (it == dialogue_domains.end()) throw UnknownIdError("no domain information for " + id);
        return std::any_of(spec.excluded_domains.begin(), spec.excluded_domains.end(),
                           [&](Domain d) { return it->second.contains(d); });
    };

    Splits s;
    if (!spec.excluded_domains.empty()) {
        s.source.emplace();
        s.target.emplace();
    }
    for (const auto& id : ids) {
        int which = 0;
        if (official) {
            which = dev.contains(id) ? 1 : test.contains(id) ? 2 : 0;
        } else {
            StableHasher h;
            h.field("split").field(id);
            const auto bucket = h.digest() % 10;
            which = bucket == 0 ? 1 : bucket == 1 ? 2 : 0;
        }
        auto pick = [which](SplitLists& l) -> std::vector<std::string>& {
            return which == 1 ? l.dev : which == 2 ? l.test : l.train;
        };
        pick(s.all).push_back(id);
        if (s.source) pick(touches_excluded(id) ? *s.target : *s.source).push_back(id);
    }
    return s;
}

Json stats(const Dataset& data) {
    Counts total;
    for (const auto& d : data.dialogues) total += count(d);

    const Json& m = data.manifest;
    const Counts recorded = Counts::from_json(m.at("counts"));

    std::vector<std::string> ids;
    for (const auto& d : data.dialogues) ids.push_back(d.dialogue_id);
    std::map<std::string, std::set<Domain>> domains;
    for (const auto& [id, list] : m.at("dialogue_domains").items()) {
        for (const auto& dn : list) {
            if (auto d = parse_domain(dn.get<std::string>())) domains[id].insert(*d);
        }
    }
    SplitSpec spec;
    spec.dev = m.at("official_splits").at("dev").get<std::vector<std::string>>();
    spec.test = m.at("official_splits").at("test").get<std::vector<std::string>>();
    const Splits splits = make_splits(ids, spec, domains);

    std::map<std::string, std::size_t> reasons;
    for (const auto& e : m.at("excluded")) {
        const std::string r = e.at("reason").get<std::string>();
        ++reasons[r.substr(0, r.find(':'))];
    }
    const std::size_t excluded = m.at("excluded").size();
    const std::size_t out_of_scope = m.at("out_of_scope").size();

    Json per_domain = Json::object();
    for (const auto& [d, c] : total.per_domain) {
        per_domain[d] = Json{{"click", c.click}, {"input", c.input},
                             {"click_share", ratio(static_cast<double>(c.click), static_cast<double>(c.click + c.input))}};
    }

    const double dialogues = static_cast<double>(total.dialogues);
    const double sys_turns = static_cast<double>(total.system_turns);
    Json r = Json::object();
    r["dialogues"] = total.dialogues;
    r["turns"] = total.utterances;
    r["system_turns"] = total.system_turns;
    r["utterances_per_dialogue"] = ratio(static_cast<double>(total.utterances), dialogues);
    r["snapshots"] = total.snapshots;
    r["snapshots_per_system_turn"] = ratio(static_cast<double>(total.snapshots), sys_turns);
    r["instructions"] = total.instructions;
    r["instructions_per_system_turn"] = ratio(static_cast<double>(total.instructions), sys_turns);
    r["clicks"] = total.clicks;
    r["inputs"] = total.inputs;
    r["per_domain"] = per_domain;
    r["splits"] = Json{{"train", splits.all.train.size()},
                       {"dev", splits.all.dev.size()},
                       {"test", splits.all.test.size()},
                       {"official_lists", !spec.dev.empty() || !spec.test.empty()}};
    r["excluded"] = Json{{"uncompilable", excluded},
                         {"out_of_scope", out_of_scope},
                         {"reasons", reasons},
                         {"compiled_share", ratio(dialogues, dialogues + static_cast<double>(excluded))}};
    r["manifest_consistent"] = recorded.to_json() == total.to_json();
    r["reference_comparison"] = Json{
        {"dialogues", compare(dialogues, ReferenceFigures::dialogues)},
        {"train", compare(static_cast<double>(splits.all.train.size()), ReferenceFigures::train)},
        {"dev", compare(static_cast<double>(splits.all.dev.size()), ReferenceFigures::dev)},
        {"test", compare(static_cast<double>(splits.all.test.size()), ReferenceFigures::test)},
        {"utterances_per_dialogue", compare(r["utterances_per_dialogue"].get<double>(),
                                            ReferenceFigures::utterances_per_dialogue)},
        {"instructions_per_system_turn", compare(r["instructions_per_system_turn"].get<double>(),
                                                 ReferenceFigures::instructions_per_system_turn)},
        {"snapshots_per_system_turn", compare(r["snapshots_per_system_turn"].get<double>(),
                                              ReferenceFigures::snapshots_per_system_turn)},
    };
    return r;
}

ReplayResult replay_dialogue(const MmwozDialogue& dialogue, kb::DatabasePtr db, const LayoutConfig& config) {
    ReplayResult r;
    gui::GuiState s = gui::new_session(std::move(db), dialogue.dialogue_id, config);
    auto check = [&](std::uint64_t expected, int turn, std::size_t step) {
        ++r.digests_checked;
        if (gui::state_digest(s) == expected) return true;
        r.ok = false;
        r.mismatch = "turn " + std::to_string(turn) + " step " + std::to_string(step) + ": digest " +
                     to_hex64(gui::state_digest(s)) + " != " + to_hex64(expected);
        return false;
    };
    for (const auto& t : dialogue.turns) {
        if (t.speaker != Speaker::system || !t.screen_annotation || t.screen_annotation->empty()) continue;
        const auto& steps = *t.screen_annotation;
        s.turn_index = t.turn_index;
        if (!check(steps[0].state_digest, t.turn_index, 0)) return r;
        for (std::size_t k = 0; k < steps.size(); ++k) {
            for (const auto& op : steps[k].operations) {
                try {
                    s = gui::apply_operation(s, op);
                } catch (const Error& e) {
                    r.ok = false;
                    r.mismatch = "turn " + std::to_string(t.turn_index) + " step " + std::to_string(k) + ": " +
                                 e.code() + ": " + e.what();
                    return r;
                }
            }
            if (k + 1 < steps.size() && !check(steps[k + 1].state_digest, t.turn_index, k + 1)) return r;
        }
    }
    return r;
}

}  // namespace mmwoz::dataset
