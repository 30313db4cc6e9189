#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "cradle/agents.hpp"
#include "cradle/error.hpp"
#include "cradle/session.hpp"

using namespace cradle;
using nlohmann::json;

namespace {

std::string record(SessionConfig config, Agent& agent, std::int64_t steps) {
    Session s(std::move(config));
    std::ostringstream log;
    s.record_to(&log);
    run_episode(s, agent, steps);
    return log.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

ReplayReport replay_text(const std::string& text) {
    std::istringstream in(text);
    return replay(in);
}

}  // namespace

TEST_CASE("reset is deterministic and starts at rest") {
    SessionConfig c;
    c.seed = 7;
    Session a(c), b(c);
    const auto oa = a.reset();
    const auto ob = b.reset();
    CHECK(observation_to_json(oa).dump() == observation_to_json(ob).dump());
    CHECK(a.hash() == b.hash());
    CHECK(oa.t == 0);
    CHECK(oa.stage == 0);
    CHECK(oa.intero.thirst == 0.0);
    for (const auto& cell : oa.retina.cells) CHECK(cell == RetinaCell{0, 0.0});
    CHECK(a.live());
    // Toys are absent in S0.
    for (const auto& e : a.world().entities)
        if (e.kind == EntityKind::Toy) CHECK_FALSE(e.present);
}

TEST_CASE("reset validates the config") {
    SessionConfig c;
    c.schedule.durations[1] = 0;
    Session s(c);
    CHECK_THROWS_AS(s.reset(), ConfigError);
    CHECK_FALSE(s.live());
}

TEST_CASE("step before reset") {
    Session s;
    CHECK_THROWS_AS(s.step({}), NoSession);
    CHECK_THROWS_AS(s.step_json(json::object()), NoSession);
}

TEST_CASE("null action ticks the drives") {
    Session s;
    s.reset();
    const auto o = s.step({});
    CHECK(o.t == 1);
    CHECK(o.intero.thirst == doctest::Approx(0.001));
    CHECK(o.intero.hunger == doctest::Approx(0.0005));
}

TEST_CASE("malformed wire action leaves the session untouched") {
    Session s;
    s.reset();
    s.step({});
    const auto h = s.hash();
    CHECK_THROWS_AS(s.step_json(json::parse(R"({"muscles":{"wings":1}})")), ActionDecodeError);
    CHECK_THROWS_AS(s.step_json(json::parse(R"({"vocal":{"type":"speech","frame":[9,3]}})")), ActionDecodeError);
    CHECK_THROWS_AS(s.step_json(json::parse(R"({"vocal":{"type":"sing"}})")), ActionDecodeError);
    CHECK_THROWS_AS(s.step_json(json::parse("7")), ActionDecodeError);
    CHECK(s.hash() == h);
    CHECK(s.t() == 1);
    CHECK(s.step_json(json::object())["t"] == 2);
}

TEST_CASE("out of range muscles are clamped and flagged") {
    Session s;
    s.reset();
    ActionCommand a;
    a.muscles.head_turn = 4.0;
    const auto o = s.step(a);
    CHECK(o.has_event("action_clamped"));
    CHECK(o.proprio.gaze == doctest::Approx(0.2));
}

TEST_CASE("a cry reaches the caregiver one step later") {
    Session s;
    s.reset();
    ActionCommand cry;
    cry.vocal = Vocal::cry(1.0);
    const auto first = s.step(cry);
    CHECK(s.caregiver().mode == CaregiverMode::Idle);
    CHECK_FALSE(first.has_event("caregiver_mode"));
    const auto second = s.step({});
    CHECK(s.caregiver().mode == CaregiverMode::Approach);
    CHECK(second.has_event("caregiver_mode", "Approach"));
    CHECK(second.has_event("investigate", "cry"));
}

TEST_CASE("a cry from a far corner still brings her when within range") {
    // Caregiver moved 11 m away: intensity 1 - 11/12 = 0.083 < 0.2, she stays.
    Session s;
    s.reset();
    s.world_mut().at(layout::kCaregiverId).pose.position = layout::kCrib + Vec2{11.0, 0.0};
    ActionCommand cry;
    cry.vocal = Vocal::cry(1.0);
    s.step(cry);
    s.step({});
    CHECK(s.caregiver().mode == CaregiverMode::Idle);

    // 9 m: 0.25 >= 0.2.
    Session t;
    t.reset();
    t.world_mut().at(layout::kCaregiverId).pose.position = layout::kCrib + Vec2{9.0, 0.0};
    t.step(cry);
    t.step({});
    CHECK(t.caregiver().mode == CaregiverMode::Approach);
}

TEST_CASE("server side reflexes cry at the first step past the threshold") {
    SessionConfig c;
    c.reflexes.server_side = true;
    Session s(c);
    ObservationFrame o = s.reset();
    std::int64_t crossing = -1;
    std::int64_t first_cry = -1;
    for (int i = 0; i < 700 && first_cry < 0; ++i) {
        if (crossing < 0 && o.intero.thirst > 0.6) crossing = o.t;
        const std::int64_t t = o.t;
        o = s.step({});
        for (const auto& snd : s.world().pending_sounds)
            if (snd.kind == SoundKind::Cry && first_cry < 0) first_cry = t;
    }
    CHECK(crossing == 600);
    CHECK(first_cry == crossing);
}

TEST_CASE("audio lags one step and onset marks the first heard frame") {
    Session s;
    s.reset();
    const CodecParams codec;
    s.caregiver_mut().narration = make_narration(s.codebook(), codec, "MILK", 1);
    const auto o1 = s.step({});
    CHECK(o1.has_event("narration_started", "MILK"));
    CHECK(o1.audio.frame.empty());
    const auto o2 = s.step({});
    CHECK(o2.audio.intensity > 0.0);
    CHECK(o2.audio.onset);
    CHECK_FALSE(o2.audio.frame.empty());
    const auto o3 = s.step({});
    CHECK_FALSE(o3.audio.onset);
    // Caregiver at +x, gaze 0: bearing ~0.
    CHECK(std::abs(o2.audio.bearing) < 0.05);
}

TEST_CASE("stage changes are announced and toys appear") {
    SessionConfig c;
    c.schedule.durations = {5, 5, 5, 5, 5};
    Session s(c);
    s.reset();
    std::vector<std::string> stages;
    for (int i = 0; i < 25; ++i) {
        const auto o = s.step({});
        for (const auto& e : o.events)
            if (e.tag == "stage") stages.push_back(e.detail);
    }
    CHECK(stages == std::vector<std::string>{"M0_3", "M3_6", "M6_9", "M9_12"});
    int toys = 0;
    for (const auto& e : s.world().entities) toys += e.kind == EntityKind::Toy && e.present;
    CHECK(toys == 4);
}

TEST_CASE("start_stage and initial drives") {
    SessionConfig c;
    c.start_stage = 4;
    c.initial = {0.65, 0.1};
    Session s(c);
    const auto o = s.reset();
    CHECK(o.stage == 4);
    CHECK(o.intero.thirst == 0.65);
    CHECK(s.mask().allows(channel::kSpeech));
}

TEST_CASE("observation json round trip") {
    SessionConfig c;
    c.start_stage = 2;
    Session s(c);
    BabblerAgent agent(3, c.codec);
    ObservationFrame o = s.reset();
    for (int i = 0; i < 200; ++i) {
        const json j = observation_to_json(o);
        CHECK(observation_to_json(observation_from_json(j, 512)) == j);
        o = s.step(agent.act(o));
    }
    ActionCommand a;
    a.muscles = {0.1, -0.2, 0.3, 0.4, 0.5};
    a.vocal = Vocal::speech(SdrFrame{{1, 5, 9}});
    CHECK(action_from_json(action_to_json(a), 512) == a);
    a.vocal = Vocal::cry(0.3);
    CHECK(action_from_json(action_to_json(a), 512) == a);
}

TEST_CASE("observation keys never name a reward") {
    const std::regex bad("reward|return|score", std::regex::icase);
    std::function<void(const json&)> scan = [&](const json& j) {
        if (j.is_object())
            for (auto it = j.begin(); it != j.end(); ++it) {
                CHECK_FALSE(std::regex_search(it.key(), bad));
                scan(it.value());
            }
        else if (j.is_array())
            for (const auto& v : j) scan(v);
    };
    scan(observation_schema());
    Session s;
    scan(observation_to_json(s.reset()));
}

TEST_CASE("record format") {
    ReflexAgent agent;
    const auto lines = lines_of(record(SessionConfig{}, agent, 5));
    REQUIRE(lines.size() == 7);
    const json header = json::parse(lines[0]);
    CHECK(header["type"] == "header");
    CHECK(header["version"] == 1);
    CHECK(header["config"] == config_to_json(SessionConfig{}));
    const json first = json::parse(lines[1]);
    CHECK(first["t"] == 0);
    CHECK(first["action"].is_null());
    CHECK(first["world_hash"].get<std::string>().size() == 16);
    for (std::size_t i = 2; i < lines.size(); ++i) CHECK(json::parse(lines[i])["t"] == i - 1);
}

TEST_CASE("record and replay close") {
    ReflexAgent reflex;
    BabblerAgent babbler(9, CodecParams{});
    for (Agent* agent : std::initializer_list<Agent*>{&reflex, &babbler}) {
        SessionConfig c;
        c.seed = 5;
        c.start_stage = 3;
        const std::string a = record(c, *agent, 1000);
        agent->reseed(9);
        const std::string b = record(c, *agent, 1000);
        CHECK(a == b);
        const auto r = replay_text(a);
        CHECK(r.ok());
        CHECK(r.entries == 1001);
    }
}

TEST_CASE("replay finds a tampered hash or observation") {
    ReflexAgent agent;
    auto lines = lines_of(record(SessionConfig{}, agent, 50));
    auto hashed = lines;
    json e = json::parse(hashed[21]);
    e["world_hash"] = "0000000000000000";
    hashed[21] = e.dump();
    auto r = replay_text(join(hashed));
    CHECK(r.first_divergence == 20);
    CHECK(r.reason == "world_hash");
    CHECK(r.entries == 51);

    auto observed = lines;
    e = json::parse(observed[31]);
    e["obs"]["intero"]["thirst"] = 0.5;
    observed[31] = e.dump();
    r = replay_text(join(observed));
    CHECK(r.first_divergence == 30);
    CHECK(r.reason == "obs");

    // Reformatting alone is not a divergence.
    auto spaced = lines;
    spaced[11] = json::parse(spaced[11]).dump(1);
    std::string text = join(spaced);
    // dump(1) spans several lines; keep it on one.
    spaced[11] = std::regex_replace(spaced[11], std::regex("\n"), " ");
    CHECK(replay_text(join(spaced)).ok());
}

TEST_CASE("replay parse errors carry the line number") {
    ReflexAgent agent;
    auto lines = lines_of(record(SessionConfig{}, agent, 10));
    auto check_line = [](const std::string& text, std::size_t line) {
        try {
            replay_text(text);
            FAIL("expected LogParseError");
        } catch (const LogParseError& e) {
            CHECK(e.line == line);
        }
    };
    auto truncated = lines;
    truncated[6] = truncated[6].substr(0, truncated[6].size() / 2);
    truncated.resize(7);
    check_line(join(truncated), 7);

    auto skipped = lines;
    skipped.erase(skipped.begin() + 4);
    check_line(join(skipped), 5);

    auto no_header = lines;
    no_header.erase(no_header.begin());
    check_line(join(no_header), 1);

    check_line("", 1);
}

TEST_CASE("record_path writes a log file") {
    const std::string path = "test_session_record.log";
    SessionConfig c;
    c.record_path = path;
    {
        Session s(c);
        s.reset();
        for (int i = 0; i < 3; ++i) s.step({});
    }
    std::ifstream in(path);
    REQUIRE(in);
    const auto r = replay(in);
    CHECK(r.ok());
    CHECK(r.entries == 4);
    std::remove(path.c_str());

    c.record_path = "/nonexistent-dir/x.log";
    Session bad(c);
    CHECK_THROWS_AS(bad.reset(), ConfigError);
}

TEST_CASE("sounds never outlive one step") {
    Session s;
    s.reset();
    BabblerAgent agent(4, CodecParams{});
    ObservationFrame o = s.last_observation();
    for (int i = 0; i < 1000; ++i) {
        o = s.step(agent.act(o));
        for (const auto& snd : s.world().pending_sounds) CHECK(snd.emitted_step == o.t - 1);
    }
}

TEST_CASE("hash_hex") {
    CHECK(hash_hex(0) == "0000000000000000");
    CHECK(hash_hex(0xdeadbeefULL) == "00000000deadbeef");
}
