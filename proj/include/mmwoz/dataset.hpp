#pragma once

#include "mmwoz/annotation.hpp"
#include "mmwoz/compiler.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/multiwoz.hpp"
#include "mmwoz/state.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mmwoz::dataset {

inline constexpr const char* kFormat = "mmwoz/1";

/// A dialogue the compiler could not annotate, and why.
struct Exclusion {
    std::string dialogue_id;
    int turn_index = 0;
    std::string reason;
};

struct DomainOpCounts {
    std::size_t click = 0;
    std::size_t input = 0;
};

/// Additive corpus tallies; summing per-dialogue counts in any order gives the same totals.
struct Counts {
    std::size_t dialogues = 0;
    std::size_t utterances = 0;
    std::size_t system_turns = 0;
    std::size_t snapshots = 0;
    std::size_t instructions = 0;
    std::size_t clicks = 0;
    std::size_t inputs = 0;
    std::map<std::string, DomainOpCounts> per_domain;

    Counts& operator+=(const Counts& o);
    [[nodiscard]] Json to_json() const;
    static Counts from_json(const Json& j);
};

Counts count(const MmwozDialogue& d);

/// Domain an operation acts on, from its element id ("menu.hotel" -> "hotel").
std::string operation_domain(const OperationInstruction& op);

struct EmitSettings {
    LayoutConfig layout;
    /// Database directory recorded in the manifest.
    std::string database;
    bool images = false;
    bool embed_text = false;
    std::vector<std::string> dev_ids;
    std::vector<std::string> test_ids;
    std::vector<std::string> out_of_scope;
};

/// Gold entity values of a system turn: act values for name, address, postcode,
/// phone, ref, id and car that occur in the utterance, located on `final_layout`.
std::vector<EntityMention> entity_mentions(const RawTurn& turn, const layout::Layout& final_layout);

/// Annotation form of a compiled dialogue. Snapshot paths are set when `images`.
MmwozDialogue annotate(const RawDialogue& raw, const compiler::CompiledDialogue& compiled, bool images,
                       bool embed_text);

struct EmitItem {
    const RawDialogue* raw = nullptr;
    compiler::CompiledDialogue compiled;
};

/// Writes dialogues/<id>.json, images/<id>_<turn>_<k>.png (when enabled) and
/// manifest.json. Returns the manifest. Throws IoError.
Json emit_mmwoz(const std::vector<EmitItem>& items, const std::vector<Exclusion>& excluded,
                const std::filesystem::path& out, const EmitSettings& settings);

/// Compiles and emits a whole corpus, streaming dialogues through `threads`
/// workers (0 = hardware concurrency). Output is identical to emit_mmwoz over
/// the same dialogues.
Json compile_corpus(const MultiwozCorpus& corpus, kb::DatabasePtr db, const std::filesystem::path& out,
                    const EmitSettings& settings, unsigned threads = 0);

struct Dataset {
    std::filesystem::path root;
    Json manifest;
    std::vector<MmwozDialogue> dialogues;
};

/// Reads manifest.json and every annotation file it lists.
Dataset load_dataset(const std::filesystem::path& dir);
LayoutConfig layout_from_manifest(const Json& manifest);

struct SplitSpec {
    /// Official held-out lists; when both are empty a stable hash assigns ~10% each.
    std::vector<std::string> dev;
    std::vector<std::string> test;
    std::set<Domain> excluded_domains;
};

struct SplitLists {
    std::vector<std::string> train;
    std::vector<std::string> dev;
    std::vector<std::string> test;
};

struct Splits {
    SplitLists all;
    /// With excluded domains: dialogues touching none of them / touching at least one.
    std::optional<SplitLists> source;
    std::optional<SplitLists> target;
};

/// Throws UnknownIdError for duplicate ids or ids without domain information.
Splits make_splits(const std::vector<std::string>& ids, const SplitSpec& spec,
                   const std::map<std::string, std::set<Domain>>& dialogue_domains);

/// Figures the corpus is compared against in stats reports.
struct ReferenceFigures {
    static constexpr double dialogues = 9849;
    static constexpr double train = 7867;
    static constexpr double dev = 990;
    static constexpr double test = 992;
    static constexpr double utterances_per_dialogue = 14.09;
    static constexpr double instructions_per_system_turn = 2.28;
    static constexpr double snapshots_per_system_turn = 2.16;
};

/// Recounts an emitted dataset from its annotation files and reports means,
/// per-domain click/input counts, split sizes, deviations from ReferenceFigures
/// and a histogram of exclusion reasons.
Json stats(const Dataset& data);

struct ReplayResult {
    bool ok = true;
    std::size_t digests_checked = 0;
    std::string mismatch;
};

/// Re-executes every recorded operation on a fresh session and compares each
/// state digest with the annotation.
ReplayResult replay_dialogue(const MmwozDialogue& dialogue, kb::DatabasePtr db, const LayoutConfig& config);

}  // namespace mmwoz::dataset
