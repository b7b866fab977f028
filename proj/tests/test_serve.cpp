#include "support.hpp"

#include "mmwoz/hash.hpp"
#include "mmwoz/server.hpp"
#include "mmwoz/session.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <thread>

using namespace mmwoz;
using namespace mmwoz::serve;
using mmwoz::testing::TempDir;
using mmwoz::testing::click;
using mmwoz::testing::full_db;
using mmwoz::testing::type;

namespace {

struct Driver {
    SessionState s;
    explicit Driver(const std::filesystem::path& out = std::filesystem::temp_directory_path())
        : s(make_session(full_db(), ServeOptions{{}, out})) {}

    Json send(const Json& msg) {
        auto [next, reply] = handle(s, msg);
        s = std::move(next);
        return reply;
    }
};

Json find_element(const Json& obs, const std::string& id) {
    for (const auto& e : obs.at("elements")) {
        if (e.at("id") == id) return e;
    }
    ADD_FAILURE() << "no element " << id;
    return Json();
}

Json act(const Json& obs, const std::string& id, std::optional<std::string> value = std::nullopt) {
    Json op{{"op", value ? "input" : "click"}, {"bbox", find_element(obs, id).at("bbox")}};
    if (value) op["value"] = *value;
    return {{"kind", "act"}, {"op", op}};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MMWOZ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// A scripted restaurant search that ends with a response.
void script(Driver& d) {
    auto obs = d.send({{"kind", "reset"}, {"dialogue_id", "S1"}}).at("observation");
    d.send({{"kind", "user_say"}, {"text", "an expensive indian place in the centre please"}});
    obs = d.send(act(obs, "restaurant.finding.food", "indian")).at("observation");
    obs = d.send(act(obs, "restaurant.finding.pricerange.expensive")).at("observation");
    obs = d.send(act(obs, "restaurant.finding.area.centre")).at("observation");
    obs = d.send(act(obs, "restaurant.finding.search")).at("observation");
    ASSERT_EQ(d.send({{"kind", "respond"}, {"text", "There are 6 of them."}}).at("ok"), true);
}

}  // namespace

TEST(ServeSession, ResetShowsMenu) {
    Driver d;
    const Json r = d.send({{"kind", "reset"}, {"dialogue_id", "S0"}});
    ASSERT_EQ(r.at("ok"), true);
    int menu = 0;
    for (const auto& e : r.at("observation").at("elements")) menu += e.at("id").get<std::string>().starts_with("menu.");
    EXPECT_EQ(menu, 5);
    EXPECT_EQ(r.at("observation").at("active_domain"), "restaurant");
    EXPECT_FALSE(r.at("observation").contains("png_base64"));
}

TEST(ServeSession, ActMatchesDirectSimulator) {
    Driver d;
    script(d);
    auto g = gui::new_session(full_db(), "S1", {});
    g = type(g, "restaurant.finding.food", "indian");
    g = click(g, "restaurant.finding.pricerange.expensive");
    g = click(g, "restaurant.finding.area.centre");
    g = click(g, "restaurant.finding.search");
    EXPECT_EQ(d.s.gui.panel(Domain::restaurant).results, g.panel(Domain::restaurant).results);
    const Json obs = d.send({{"kind", "observe"}}).at("observation");
    EXPECT_EQ(obs.at("state_digest"), to_hex64(gui::state_digest(d.s.gui)));
    EXPECT_EQ(find_element(obs, "restaurant.results.count").at("text"), "6 matches");
}

TEST(ServeSession, ObservationIsLayoutExport) {
    Driver d;
    script(d);
    const Json obs = d.send({{"kind", "observe"}}).at("observation");
    const auto lay = layout::current_layout(d.s.gui);
    EXPECT_EQ(obs.at("elements"), layout_export(lay));
    ASSERT_EQ(obs.at("elements").size(), lay.elements.size());
    std::vector<std::string> texts;
    for (const auto& e : lay.elements) {
        if (!e.text.empty()) texts.push_back(e.text);
    }
    EXPECT_EQ(obs.at("text").get<std::vector<std::string>>(), texts);
}

TEST(ServeSession, ErrorsLeaveStateUnchanged) {
    Driver d;
    EXPECT_EQ(d.send({{"kind", "observe"}}).at("error").at("type"), "ProtocolError");
    d.send({{"kind", "reset"}});
    EXPECT_EQ(d.send({{"kind", "act"}, {"op", {{"op", "click"}, {"bbox", {0, 0, 1, 1}}}}}).at("ok"), false);
    d.send({{"kind", "user_say"}, {"text", "hi"}});
    const auto digest = gui::state_digest(d.s.gui);
    const Json miss = d.send({{"kind", "act"}, {"op", {{"op", "click"}, {"bbox", {420, 200, 421, 201}}}}});
    EXPECT_EQ(miss.at("error").at("type"), "NoTargetError");
    EXPECT_EQ(d.send({{"kind", "user_say"}, {"text", "again"}}).at("error").at("type"), "ProtocolError");
    EXPECT_EQ(d.send({{"kind", "fly"}}).at("ok"), false);
    EXPECT_EQ(d.send({{"kind", "act"}, {"op", {{"op", "click"}}}}).at("ok"), false);
    EXPECT_EQ(gui::state_digest(d.s.gui), digest);

    auto [same, reply] = handle_line(d.s, "{not json");
    EXPECT_EQ(reply.at("error").at("type"), "ProtocolError");
    EXPECT_EQ(gui::state_digest(same.gui), digest);
}

TEST(ServeSession, EmptyCloseHasNoTurns) {
    Driver d;
    d.send({{"kind", "reset"}, {"dialogue_id", "E"}});
    const Json r = d.send({{"kind", "close"}});
    ASSERT_EQ(r.at("ok"), true);
    EXPECT_TRUE(r.at("trajectory").at("turns").empty());
}

TEST(ServeSession, TrajectoryIsValidAnnotation) {
    TempDir dir("serve_traj");
    Driver d(dir.path());
    script(d);
    const Json r = d.send({{"kind", "close"}, {"path", (dir.path() / "t.json").string()}});
    ASSERT_EQ(r.at("ok"), true);
    const auto traj = dialogue_from_json(r.at("trajectory"));
    ASSERT_EQ(traj.turns.size(), 2u);
    EXPECT_EQ(traj.turns[0].speaker, Speaker::user);
    ASSERT_TRUE(traj.turns[1].screen_annotation);
    std::size_t ops = 0;
    for (const auto& step : *traj.turns[1].screen_annotation) ops += step.operations.size();
    EXPECT_EQ(ops, 4u);
    EXPECT_EQ(traj.turns[1].domains, std::vector<Domain>{Domain::restaurant});
    EXPECT_EQ(read_dialogue_file(dir.path() / "t.json"), traj);
    EXPECT_TRUE(dataset::replay_dialogue(traj, full_db(), {}).ok);
}

TEST(ServeSession, TranscriptDeterminism) {
    Driver a, b;
    script(a);
    script(b);
    EXPECT_EQ(dialogue_to_json(record_trajectory(a.s)), dialogue_to_json(record_trajectory(b.s)));
}

TEST(ServeStream, StdioLoop) {
    std::istringstream in(R"({"kind": "reset", "dialogue_id": "X", "images": "base64"})"
                          "\n{\"kind\": \"observe\"}\n{\"kind\": \"close\"}\n{\"kind\": \"observe\"}\n");
    std::ostringstream out;
    serve_stream(in, out, full_db(), {});
    std::istringstream lines(out.str());
    std::vector<Json> replies;
    for (std::string l; std::getline(lines, l);) replies.push_back(Json::parse(l));
    ASSERT_EQ(replies.size(), 3u);
    EXPECT_TRUE(replies[1].at("observation").contains("png_base64"));
    EXPECT_TRUE(replies[2].contains("trajectory"));
}

TEST(ServeTcp, RoundTrip) {
    TcpServer server(full_db(), {});
    const auto port = server.bind(0);
    std::thread t([&] { server.run(); });

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
    const std::string req = "{\"kind\": \"reset\", \"dialogue_id\": \"TCP\"}\n{\"kind\": \"close\"}\n";
    ASSERT_EQ(::send(fd, req.data(), req.size(), 0), static_cast<ssize_t>(req.size()));
    std::string buf;
    char chunk[4096];
    while (std::count(buf.begin(), buf.end(), '\n') < 2) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buf.append(chunk, static_cast<std::size_t>(n));
    }
    ::close(fd);
    server.stop();
    t.join();

    std::istringstream lines(buf);
    std::string first, second;
    std::getline(lines, first);
    std::getline(lines, second);
    EXPECT_EQ(Json::parse(first).at("observation").at("dialogue_id"), "TCP");
    EXPECT_TRUE(Json::parse(second).at("trajectory").at("turns").empty());
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("compile --out /tmp/x"), 2);
    EXPECT_EQ(run_cli("stats --data /nonexistent/mmwoz"), 1);
    EXPECT_EQ(run_cli("eval --gold /nonexistent/mmwoz --pred /nonexistent/p.jsonl"), 1);
    TempDir dir("cli");
    const auto src = mmwoz::testing::source_dir();
    EXPECT_EQ(run_cli("compile --multiwoz " + (src / "data/sample_multiwoz_mini").string() + " --db " +
                      (src / "data/db").string() + " --out " + dir.path().string()),
              0);
    EXPECT_EQ(run_cli("stats --data " + dir.path().string()), 0);
    EXPECT_EQ(run_cli("replay --data " + dir.path().string()), 0);
}
