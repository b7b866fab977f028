#include "support.hpp"

#include "mmwoz/multiwoz.hpp"
#include "mmwoz/text.hpp"

#include <fstream>
#include <sstream>

using namespace mmwoz;
using namespace mmwoz::dataset;
using mmwoz::testing::TempDir;
using mmwoz::testing::full_db;
using mmwoz::testing::sample_dataset;
using mmwoz::testing::source_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree(const std::filesystem::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
    }
    return out;
}

EmitSettings settings_for(const MultiwozCorpus& corpus) {
    EmitSettings s;
    s.database = (source_dir() / "data/db").string();
    s.dev_ids = corpus.dev_ids;
    s.test_ids = corpus.test_ids;
    s.out_of_scope = corpus.out_of_scope;
    return s;
}

Json hospital_dialogue() {
    Json log = Json::array();
    log.push_back({{"text", "I need the hospital."}, {"metadata", Json::object()}, {"dialog_act", Json::object()}});
    log.push_back({{"text", "The number is 01223217413."},
                   {"metadata", {{"hospital", {{"book", {{"booked", Json::array()}}}, {"semi", {{"department", "x"}}}}}}},
                   {"dialog_act", {{"Hospital-Inform", Json::array({Json::array({"Phone", "01223217413"})})}}}});
    return {{"goal", {{"hospital", {{"info", Json::object()}}}}}, {"log", log}};
}

}  // namespace

TEST(MultiwozLoad, MiniCorpus) {
    const auto corpus = load_multiwoz(source_dir() / "data/sample_multiwoz_mini");
    ASSERT_EQ(corpus.dialogues.size(), 3u);
    EXPECT_EQ(corpus.dialogues[0].dialogue_id, "MUL0001");
    EXPECT_TRUE(corpus.dev_ids.empty());
    for (const auto& d : corpus.dialogues) {
        EXPECT_EQ(d.turns.size() % 2, 0u);
        for (std::size_t i = 0; i < d.turns.size(); ++i) {
            EXPECT_EQ(d.turns[i].speaker, i % 2 ? Speaker::system : Speaker::user);
        }
        const auto sys = d.system_turns();
        EXPECT_EQ(sys.size(), d.turns.size() / 2);
        for (const auto& t : sys) EXPECT_EQ(t.turn_index % 2, 1);
    }
}

TEST(MultiwozLoad, HospitalIsOutOfScope) {
    Json data;
    data["H1.json"] = hospital_dialogue();
    const auto corpus = parse_multiwoz(data);
    EXPECT_TRUE(corpus.dialogues.empty());
    EXPECT_EQ(corpus.out_of_scope, std::vector<std::string>{"H1"});
}

TEST(MultiwozLoad, ErrorsNameTheFile) {
    TempDir dir("mw_bad");
    try {
        load_multiwoz(dir.path());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("data.json"), std::string::npos);
    }
    std::ofstream(dir.path() / "data.json") << "{\"X\": ";
    try {
        load_multiwoz(dir.path());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("data.json"), std::string::npos);
    }
    Json data;
    data["BAD1.json"] = {{"goal", Json::object()}};
    try {
        parse_multiwoz(data);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("BAD1"), std::string::npos);
    }
}

TEST(MultiwozLoad, ActSlotVocabulary) {
    EXPECT_EQ(canonical_act_slot("Addr"), "address");
    EXPECT_EQ(canonical_act_slot("Leave"), "leaveAt");
    EXPECT_EQ(canonical_act_slot("Arrive"), "arriveBy");
    EXPECT_EQ(canonical_act_slot("Ref"), "ref");
    EXPECT_EQ(canonical_act_slot("Phone"), "phone");
    EXPECT_EQ(canonical_act_slot("Post"), "postcode");
}

TEST(DatasetEmit, DeterministicBytes) {
    const auto corpus = load_multiwoz(source_dir() / "data/sample_multiwoz_mini");
    TempDir a("emit_a"), b("emit_b");
    auto s = settings_for(corpus);
    s.images = true;
    compile_corpus(corpus, full_db(), a.path(), s, 1);
    compile_corpus(corpus, full_db(), b.path(), s, 4);
    const auto ta = tree(a.path());
    EXPECT_EQ(ta, tree(b.path()));
    EXPECT_TRUE(std::any_of(ta.begin(), ta.end(), [](const auto& kv) { return kv.first.ends_with(".png"); }));
}

TEST(DatasetEmit, EmptyCorpus) {
    TempDir dir("emit_empty");
    const Json m = compile_corpus({}, full_db(), dir.path(), {});
    EXPECT_EQ(m.at("counts").at("dialogues"), 0);
    EXPECT_EQ(load_dataset(dir.path()).dialogues.size(), 0u);
}

// Recount from the raw annotation JSON, without going through the typed model.
TEST(DatasetEmit, ManifestCountsMatchRecount) {
    const auto& data = sample_dataset();
    std::size_t dialogues = 0, utterances = 0, sys = 0, snaps = 0, clicks = 0, inputs = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per;
    for (const auto& e : std::filesystem::directory_iterator(data.root / "dialogues")) {
        const Json j = read_json_file(e.path());
        ++dialogues;
        for (const auto& t : j.at("turns")) {
            ++utterances;
            if (!t.contains("screen_annotation")) continue;
            ++sys;
            for (const auto& step : t.at("screen_annotation")) {
                ++snaps;
                for (const auto& op : step.at("operations")) {
                    std::string id = op.at("element_id");
                    std::string dom = id.starts_with("menu.") ? id.substr(5) : id.substr(0, id.find('.'));
                    if (op.at("op") == "click") {
                        ++clicks;
                        ++per[dom].first;
                    } else {
                        ++inputs;
                        ++per[dom].second;
                    }
                }
            }
        }
    }
    const Json& c = data.manifest.at("counts");
    EXPECT_EQ(c.at("dialogues"), dialogues);
    EXPECT_EQ(c.at("utterances"), utterances);
    EXPECT_EQ(c.at("system_turns"), sys);
    EXPECT_EQ(c.at("snapshots"), snaps);
    EXPECT_EQ(c.at("clicks"), clicks);
    EXPECT_EQ(c.at("inputs"), inputs);
    EXPECT_EQ(c.at("instructions"), clicks + inputs);
    for (const auto& [dom, ci] : per) {
        EXPECT_EQ(c.at("per_domain").at(dom).at("click"), ci.first) << dom;
        EXPECT_EQ(c.at("per_domain").at(dom).at("input"), ci.second) << dom;
    }
    EXPECT_EQ(stats(data).at("manifest_consistent"), true);
}

TEST(DatasetEmit, SampleCorpusShape) {
    const auto& data = sample_dataset();
    EXPECT_EQ(data.dialogues.size(), 25u);
    const auto& ex = data.manifest.at("excluded");
    ASSERT_EQ(ex.size(), 1u);
    EXPECT_EQ(ex[0].at("dialogue_id"), "SNG0602");
    EXPECT_TRUE(ex[0].at("reason").get<std::string>().starts_with("EntityNotOnScreenError"));
    EXPECT_EQ(data.manifest.at("out_of_scope"), Json::array({"SNG0601"}));
}

TEST(DatasetReplay, EveryDialogueReproduces) {
    const auto& data = sample_dataset();
    const auto cfg = layout_from_manifest(data.manifest);
    std::size_t digests = 0;
    for (const auto& d : data.dialogues) {
        const auto r = replay_dialogue(d, full_db(), cfg);
        EXPECT_TRUE(r.ok) << d.dialogue_id << ": " << r.mismatch;
        digests += r.digests_checked;
    }
    EXPECT_EQ(digests, data.manifest.at("counts").at("snapshots").get<std::size_t>());
}

TEST(DatasetReplay, TamperedOperationIsCaught) {
    auto d = sample_dataset().dialogues.front();
    for (auto& t : d.turns) {
        if (!t.screen_annotation) continue;
        for (auto& step : *t.screen_annotation) {
            if (!step.operations.empty()) {
                step.state_digest ^= 1;
                EXPECT_FALSE(replay_dialogue(d, full_db(), {}).ok);
                return;
            }
        }
    }
    FAIL() << "no operations in first dialogue";
}

TEST(DatasetAnnotation, JsonRoundTrip) {
    for (const auto& d : sample_dataset().dialogues) {
        EXPECT_EQ(dialogue_from_json(dialogue_to_json(d)), d);
    }
    Json bad = dialogue_to_json(sample_dataset().dialogues.front());
    bad["turns"][1]["screen_annotation"][0]["operations"] = {{{"op", "drag"}, {"bbox", {0, 0, 1, 1}}}};
    EXPECT_THROW(dialogue_from_json(bad), SchemaError);
}

TEST(DatasetAnnotation, SnapshotPathsExist) {
    const auto corpus = load_multiwoz(source_dir() / "data/sample_multiwoz_mini");
    TempDir dir("emit_img");
    auto s = settings_for(corpus);
    s.images = true;
    compile_corpus(corpus, full_db(), dir.path(), s);
    const auto data = load_dataset(dir.path());
    std::size_t n = 0;
    for (const auto& d : data.dialogues) {
        for (const auto& t : d.turns) {
            if (!t.screen_annotation) continue;
            for (const auto& step : *t.screen_annotation) {
                ASSERT_TRUE(step.snapshot);
                EXPECT_TRUE(std::filesystem::is_regular_file(dir.path() / *step.snapshot)) << *step.snapshot;
                ++n;
            }
        }
    }
    EXPECT_GT(n, 0u);
}

TEST(DatasetAnnotation, MentionsLocatedOnFinalPage) {
    for (const auto& d : sample_dataset().dialogues) {
        for (const auto& t : d.turns) {
            for (const auto& m : t.entity_mentions) {
                EXPECT_NE(text::lower(t.utterance).find(text::lower(m.value)), std::string::npos)
                    << d.dialogue_id << " " << m.value;
                EXPECT_EQ(m.element_id.has_value(), m.bbox.has_value());
            }
        }
    }
}

TEST(DatasetSplits, OfficialLists) {
    const std::map<std::string, std::set<Domain>> doms{
        {"A", {Domain::hotel}}, {"B", {Domain::train}}, {"C", {Domain::hotel, Domain::taxi}}, {"D", {Domain::restaurant}}};
    SplitSpec spec;
    spec.dev = {"B"};
    spec.test = {"C"};
    const auto s = make_splits({"A", "B", "C", "D"}, spec, doms);
    EXPECT_EQ(s.all.train, (std::vector<std::string>{"A", "D"}));
    EXPECT_EQ(s.all.dev, std::vector<std::string>{"B"});
    EXPECT_EQ(s.all.test, std::vector<std::string>{"C"});
    EXPECT_FALSE(s.source);
    EXPECT_THROW(make_splits({"A", "A"}, spec, doms), UnknownIdError);
}

TEST(DatasetSplits, HashFallbackIsStableAndCovers) {
    std::vector<std::string> ids;
    std::map<std::string, std::set<Domain>> doms;
    for (int i = 0; i < 2000; ++i) {
        ids.push_back("D" + std::to_string(i));
        doms[ids.back()] = {Domain::hotel};
    }
    const auto a = make_splits(ids, {}, doms);
    auto rev = ids;
    std::reverse(rev.begin(), rev.end());
    const auto b = make_splits(rev, {}, doms);
    EXPECT_EQ(std::set<std::string>(a.all.dev.begin(), a.all.dev.end()),
              std::set<std::string>(b.all.dev.begin(), b.all.dev.end()));
    EXPECT_EQ(a.all.train.size() + a.all.dev.size() + a.all.test.size(), ids.size());
    EXPECT_NEAR(static_cast<double>(a.all.dev.size()) / 2000.0, 0.1, 0.03);
    EXPECT_NEAR(static_cast<double>(a.all.test.size()) / 2000.0, 0.1, 0.03);
}

// Source and target partition each split; target = exactly the dialogues touching an excluded domain.
TEST(DatasetSplits, ExcludeDomainPartition) {
    const auto& data = sample_dataset();
    std::vector<std::string> ids;
    std::map<std::string, std::set<Domain>> doms;
    for (const auto& [id, list] : data.manifest.at("dialogue_domains").items()) {
        ids.push_back(id);
        for (const auto& d : list) doms[id].insert(*parse_domain(d.get<std::string>()));
    }
    for (Domain excluded : kAllDomains) {
        SplitSpec spec;
        spec.dev = data.manifest.at("official_splits").at("dev").get<std::vector<std::string>>();
        spec.test = data.manifest.at("official_splits").at("test").get<std::vector<std::string>>();
        spec.excluded_domains = {excluded};
        const auto s = make_splits(ids, spec, doms);
        ASSERT_TRUE(s.source && s.target);
        auto check = [&](const std::vector<std::string>& all, const std::vector<std::string>& src,
                         const std::vector<std::string>& tgt) {
            std::set<std::string> u(src.begin(), src.end());
            for (const auto& id : tgt) EXPECT_TRUE(u.insert(id).second) << id;
            EXPECT_EQ(u, std::set<std::string>(all.begin(), all.end()));
            for (const auto& id : tgt) EXPECT_TRUE(doms.at(id).contains(excluded));
            for (const auto& id : src) EXPECT_FALSE(doms.at(id).contains(excluded));
        };
        check(s.all.train, s.source->train, s.target->train);
        check(s.all.dev, s.source->dev, s.target->dev);
        check(s.all.test, s.source->test, s.target->test);
        EXPECT_FALSE(s.target->train.empty()) << to_string(excluded);
    }
}
