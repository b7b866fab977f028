#pragma once

#include "mmwoz/annotation.hpp"
#include "mmwoz/dataset.hpp"
#include "mmwoz/hash.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/layout.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmwoz::eval {

enum class ActionType : std::uint8_t { operate, respond };

std::string_view to_string(ActionType t);

/// One decision of an agent: either a group of operations or the response.
struct PredictedStep {
    ActionType action_type = ActionType::respond;
    std::vector<OperationInstruction> operations;
    std::string response;

    bool operator==(const PredictedStep&) const = default;
};

struct PredictedTurn {
    std::string dialogue_id;
    int turn_index = 0;
    std::vector<PredictedStep> steps;
};

/// Gold decision points of one system turn: one operate step per operation
/// group, then the respond step.
struct GoldStep {
    ActionType action_type = ActionType::respond;
    std::vector<OperationInstruction> operations;
    std::string response;
    /// Interactive elements of the observation the step is taken on.
    std::vector<std::pair<std::string, BBox>> inventory;
};

struct GoldTurn {
    std::string dialogue_id;
    int turn_index = 0;
    std::vector<GoldStep> steps;
    std::vector<EntityMention> mentions;
    std::uint64_t final_digest = 0;
};

enum class LocationMode : std::uint8_t { exact, hit_test };

struct EvalOptions {
    LocationMode location_mode = LocationMode::exact;
    /// Score against responses augmented with entity coordinates.
    bool references = false;
    /// Entity accuracy over individual entities instead of whole turns.
    bool entity_micro = false;
};

/// Additive n-gram statistics for corpus BLEU-4.
struct BleuStats {
    std::array<std::size_t, 4> matches{};
    std::array<std::size_t, 4> totals{};
    std::size_t hyp_length = 0;
    std::size_t ref_length = 0;

    BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(const std::string& hypothesis, const std::string& reference);
/// BLEU-4 x100: uniform weights, brevity penalty, add-one smoothing for n >= 2,
/// lowercased whitespace tokens. 0 for an empty corpus or empty hypotheses.
double bleu_score(const BleuStats& s);
double bleu(const std::vector<std::string>& references, const std::vector<std::string>& hypotheses);

/// Every denominator/numerator the metrics are built from; sums are order-independent.
struct Tally {
    std::size_t steps = 0, steps_ok = 0;
    std::size_t operations = 0, location_exact_ok = 0, location_hit_ok = 0, command_ok = 0;
    std::size_t operate_steps = 0, snapshot_ok = 0;
    std::size_t operate_turns = 0, turn_ok = 0;
    std::size_t entity_turns = 0, entity_turn_ok = 0;
    std::size_t entities = 0, entity_ok = 0;
    std::size_t responses = 0;
    BleuStats bleu;

    Tally& operator+=(const Tally& o);
};

/// Teacher-forced comparison of one turn; `pred` may be null (everything wrong).
Tally score_turn(const GoldTurn& gold, const PredictedTurn* pred, const EvalOptions& options);

struct MetricReport {
    double action_type_acc = 0;
    double location_acc = 0;
    double command_acc = 0;
    double snapshot_joint_acc = 0;
    double turn_joint_acc = 0;
    double entity_acc = 0;
    double bleu = 0;
    double location_acc_exact = 0;
    double location_acc_hit_test = 0;
    EvalOptions options;
    Tally tally;
    std::size_t turns = 0;
    std::size_t predicted_turns = 0;
    std::optional<double> closed_loop_acc;
    std::size_t closed_loop_turns = 0;

    [[nodiscard]] Json to_json() const;
};

MetricReport report_from_tally(const Tally& t, const EvalOptions& options);

double action_type_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred);
struct OperationAccuracy {
    double location = 0;
    double command = 0;
    double snapshot_joint = 0;
    double turn_joint = 0;
};
OperationAccuracy operation_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred,
                                     LocationMode mode = LocationMode::exact);
double entity_accuracy(const std::vector<GoldTurn>& gold, const std::vector<PredictedTurn>& pred,
                       bool micro = false);

/// Appends " (x1, y1, x2, y2)" after each mention, in mention order. Mentions
/// must resolve in `layout` (UnresolvedMentionError); a mention whose value is
/// not found in the text is skipped. Already-augmented mentions are left alone.
std::string augment_with_references(const std::string& response, const std::vector<EntityMention>& mentions,
                                    const layout::Layout& layout);

/// Gold decision points of every system turn. With `references`, responses are
/// augmented using the located mentions.
std::vector<GoldTurn> gold_turns(const MmwozDialogue& dialogue, bool references = false);

/// The gold steps as a prediction (identity baseline).
std::vector<PredictedTurn> gold_as_predictions(const std::vector<GoldTurn>& gold);

/// One JSON object per line: {dialogue_id, turn_index, steps: [...]}. Throws SchemaError.
std::vector<PredictedTurn> read_predictions(const std::filesystem::path& path);
std::vector<PredictedTurn> parse_predictions(std::istream& in);
void write_predictions(const std::filesystem::path& path, const std::vector<PredictedTurn>& preds);
Json predicted_turn_to_json(const PredictedTurn& t);

/// Scores predictions against a gold dataset; turns without a prediction count as wrong.
MetricReport evaluate(const dataset::Dataset& gold, const std::vector<PredictedTurn>& preds,
                      const EvalOptions& options);

/// Closed-loop check: each turn's predicted operations are executed from the
/// gold entry state; a turn is correct when the end-state digest matches gold.
/// Returns (correct, turns).
std::pair<std::size_t, std::size_t> closed_loop(const dataset::Dataset& gold, const std::vector<PredictedTurn>& preds,
                                                kb::DatabasePtr db);

/// Modifies one randomly chosen operation in place (bbox shift, value change
/// or kind flip). Returns false when there is no operation to corrupt.
bool corrupt_single_operation(std::vector<PredictedTurn>& preds, SplitMix64& rng);

}  // namespace mmwoz::eval
