// mmwoz command line: compile, eval, stats, serve, replay, splits, gold-predictions.
// Exit codes: 0 success, 1 validation failure or runtime error, 2 usage error.

#include "mmwoz/dataset.hpp"
#include "mmwoz/errors.hpp"
#include "mmwoz/eval.hpp"
#include "mmwoz/kb.hpp"
#include "mmwoz/multiwoz.hpp"
#include "mmwoz/server.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <iostream>

namespace fs = std::filesystem;
using namespace mmwoz;

namespace {

constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PerturbMode perturb_or_throw(const std::string& s) {
    auto m = parse_perturb_mode(s);
    if (!m) throw UsageError("--perturb must be none, interactive, noninteractive or both");
    return *m;
}

void print_json(const Json& j) { std::cout << j.dump(2, ' ', false, Json::error_handler_t::replace) << '\n'; }

fs::path database_dir(const dataset::Dataset& data, const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    const std::string recorded = data.manifest.value("database", "");
    if (recorded.empty()) throw UsageError("the dataset records no database; pass --db");
    return recorded;
}

serve::TcpServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal task-oriented dialogue environment toolkit"};
    app.require_subcommand(1);

    // compile
    std::string c_multiwoz, c_db, c_out, c_perturb = "none";
    std::uint64_t c_seed = 0;
    bool c_images = false, c_text = false;
    unsigned c_threads = 0;
    auto* compile = app.add_subcommand("compile", "Compile a MultiWOZ-format corpus into annotated GUI trajectories");
    compile->add_option("--multiwoz", c_multiwoz, "Directory with data.json")->required();
    compile->add_option("--db", c_db, "Database directory")->required();
    compile->add_option("--out", c_out, "Output directory")->required();
    compile->add_option("--seed", c_seed, "Layout perturbation seed");
    compile->add_option("--perturb", c_perturb, "none|interactive|noninteractive|both");
    compile->add_flag("--images", c_images, "Write PNG snapshots");
    compile->add_flag("--text", c_text, "Embed text dumps in the annotation files");
    compile->add_option("--threads", c_threads, "Worker threads (0 = all cores)");

    // eval
    std::string e_gold, e_pred, e_report, e_db;
    bool e_hit = false, e_refs = false, e_closed = false, e_micro = false;
    auto* evalc = app.add_subcommand("eval", "Score predictions against a compiled dataset");
    evalc->add_option("--gold", e_gold, "Compiled dataset directory")->required();
    evalc->add_option("--pred", e_pred, "Predictions (JSON lines)")->required();
    evalc->add_option("--report", e_report, "Where to write the metric report");
    evalc->add_flag("--hit-test-mode", e_hit, "Location is correct when the click lands on the gold element");
    evalc->add_flag("--refs", e_refs, "Score responses augmented with entity coordinates");
    evalc->add_flag("--closed-loop", e_closed, "Also execute predicted operations and compare end states");
    evalc->add_flag("--entity-micro", e_micro, "Entity accuracy over single entities instead of turns");
    evalc->add_option("--db", e_db, "Database for --closed-loop (default: the one recorded in the manifest)");

    // stats
    std::string s_data;
    auto* statsc = app.add_subcommand("stats", "Corpus statistics of a compiled dataset");
    statsc->add_option("--data", s_data, "Compiled dataset directory")->required();

    // serve
    std::string v_db, v_perturb = "none", v_out = ".";
    std::uint64_t v_seed = 0;
    int v_port = -1;
    auto* servec = app.add_subcommand("serve", "Run the session server (stdin/stdout, or TCP with --port)");
    servec->add_option("--db", v_db, "Database directory")->required();
    servec->add_option("--port", v_port, "TCP port on 127.0.0.1 (0 = ephemeral)")->check(CLI::Range(0, 65535));
    servec->add_option("--perturb", v_perturb, "none|interactive|noninteractive|both");
    servec->add_option("--seed", v_seed, "Layout perturbation seed");
    servec->add_option("--out", v_out, "Directory for PNG snapshots");

    // replay
    std::string r_data, r_dialogue, r_db;
    auto* replayc = app.add_subcommand("replay", "Re-execute recorded operations and check every state digest");
    replayc->add_option("--data", r_data, "Compiled dataset directory")->required();
    replayc->add_option("--dialogue", r_dialogue, "Dialogue id (default: all)");
    replayc->add_option("--db", r_db, "Database (default: the one recorded in the manifest)");

    // splits
    std::string p_data, p_out;
    std::vector<std::string> p_exclude;
    auto* splitsc = app.add_subcommand("splits", "Train/dev/test lists, optionally with a domain held out");
    splitsc->add_option("--data", p_data, "Compiled dataset directory")->required();
    splitsc->add_option("--exclude-domain", p_exclude, "Domain held out for transfer experiments");
    splitsc->add_option("--out", p_out, "Write the lists here instead of stdout");

    // gold-predictions
    std::string g_data, g_out;
    bool g_refs = false;
    auto* goldc = app.add_subcommand("gold-predictions", "Write the gold steps as a prediction file");
    goldc->add_option("--data", g_data, "Compiled dataset directory")->required();
    goldc->add_option("--out", g_out, "Output file")->required();
    goldc->add_flag("--refs", g_refs, "Use coordinate-augmented responses");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    try {
        if (*compile) {
            dataset::EmitSettings settings;
            settings.layout.perturb_mode = perturb_or_throw(c_perturb);
            settings.layout.seed = c_seed;
            settings.database = fs::absolute(c_db).lexically_normal().string();
            settings.images = c_images;
            settings.embed_text = c_text;
            auto db = kb::load_database(c_db);
            auto corpus = dataset::load_multiwoz(c_multiwoz);
            settings.dev_ids = corpus.dev_ids;
            settings.test_ids = corpus.test_ids;
            settings.out_of_scope = corpus.out_of_scope;
            const Json manifest = dataset::compile_corpus(corpus, db, c_out, settings, c_threads);
            std::cerr << "compiled " << manifest.at("dialogues").size() << " dialogues, excluded "
                      << manifest.at("excluded").size() << ", out of scope " << manifest.at("out_of_scope").size()
                      << '\n';
            return 0;
        }
        if (*evalc) {
            auto gold = dataset::load_dataset(e_gold);
            auto preds = eval::read_predictions(e_pred);
            eval::EvalOptions opts;
            opts.location_mode = e_hit ? eval::LocationMode::hit_test : eval::LocationMode::exact;
            opts.references = e_refs;
            opts.entity_micro = e_micro;
            auto report = eval::evaluate(gold, preds, opts);
            if (e_closed) {
                auto db = kb::load_database(database_dir(gold, e_db));
                auto [ok, total] = eval::closed_loop(gold, preds, db);
                report.closed_loop_turns = total;
                report.closed_loop_acc = total == 0 ? 0.0 : 100.0 * static_cast<double>(ok) / static_cast<double>(total);
            }
            const Json j = report.to_json();
            if (!e_report.empty()) write_json_file(e_report, j);
            print_json(j);
            return 0;
        }
        if (*statsc) {
            const Json s = dataset::stats(dataset::load_dataset(s_data));
            print_json(s);
            return s.value("manifest_consistent", true) ? 0 : kValidationFailure;
        }
        if (*servec) {
            serve::ServeOptions opts;
            opts.layout.perturb_mode = perturb_or_throw(v_perturb);
            opts.layout.seed = v_seed;
            opts.output_dir = v_out;
            auto db = kb::load_database(v_db);
            if (v_port < 0) {
                serve::serve_stream(std::cin, std::cout, db, opts);
                return 0;
            }
            serve::TcpServer server(db, opts);
            const auto port = server.bind(static_cast<std::uint16_t>(v_port));
            std::cerr << "listening on 127.0.0.1:" << port << '\n';
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.run();
            g_server = nullptr;
            return 0;
        }
        if (*replayc) {
            auto data = dataset::load_dataset(r_data);
            auto db = kb::load_database(database_dir(data, r_db));
            const auto config = dataset::layout_from_manifest(data.manifest);
            bool found = r_dialogue.empty();
            std::size_t dialogues = 0, digests = 0, failures = 0;
            for (const auto& d : data.dialogues) {
                if (!r_dialogue.empty() && d.dialogue_id != r_dialogue) continue;
                found = true;
                const auto r = dataset::replay_dialogue(d, db, config);
                ++dialogues;
                digests += r.digests_checked;
                if (!r.ok) {
                    ++failures;
                    std::cout << d.dialogue_id << ": " << r.mismatch << '\n';
                }
            }
            if (!found) throw UnknownIdError("no dialogue '" + r_dialogue + "' in " + r_data);
            std::cout << "replayed " << dialogues << " dialogues, " << digests << " digests, " << failures
                      << " mismatches\n";
            return failures == 0 ? 0 : kValidationFailure;
        }
        if (*splitsc) {
            auto data = dataset::load_dataset(p_data);
            dataset::SplitSpec spec;
            spec.dev = data.manifest.at("official_splits").at("dev").get<std::vector<std::string>>();
            spec.test = data.manifest.at("official_splits").at("test").get<std::vector<std::string>>();
            for (const auto& name : p_exclude) {
                auto d = parse_domain(name);
                if (!d) throw UsageError("unknown domain '" + name + "'");
                spec.excluded_domains.insert(*d);
            }
            std::map<std::string, std::set<Domain>> domains;
            for (const auto& [id, list] : data.manifest.at("dialogue_domains").items()) {
                for (const auto& dn : list) {
                    if (auto d = parse_domain(dn.get<std::string>())) domains[id].insert(*d);
                }
            }
            std::vector<std::string> ids;
            for (const auto& d : data.dialogues) ids.push_back(d.dialogue_id);
            const auto splits = dataset::make_splits(ids, spec, domains);
            auto lists = [](const dataset::SplitLists& l) {
                return Json{{"train", l.train}, {"dev", l.dev}, {"test", l.test}};
            };
            Json out{{"all", lists(splits.all)}};
            if (splits.source) out["source"] = lists(*splits.source);
            if (splits.target) out["target"] = lists(*splits.target);
            if (p_out.empty()) print_json(out);
            else write_json_file(p_out, out);
            return 0;
        }
        if (*goldc) {
            auto data = dataset::load_dataset(g_data);
            std::vector<eval::PredictedTurn> preds;
            for (const auto& d : data.dialogues) {
                auto p = eval::gold_as_predictions(eval::gold_turns(d, g_refs));
                preds.insert(preds.end(), p.begin(), p.end());
            }
            eval::write_predictions(g_out, preds);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << '\n';
        return kValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    return 0;
}
