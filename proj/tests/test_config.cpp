#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cradle/config.hpp"
#include "cradle/error.hpp"

using namespace cradle;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return json::parse(in);
}

std::string error_path(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.path;
    }
    return "<none>";
}

// Every key the serializer writes must be declared in the schema, and back.
void same_keys(const json& value, const json& schema, const std::string& where) {
    REQUIRE(schema.contains("properties"));
    const json& props = schema["properties"];
    for (auto it = value.begin(); it != value.end(); ++it) {
        INFO(where << "." << it.key());
        REQUIRE(props.contains(it.key()));
        if (it.value().is_object()) same_keys(it.value(), props[it.key()], where + "." + it.key());
    }
    CHECK(schema.value("additionalProperties", true) == false);
}

}  // namespace

TEST_CASE("empty config is complete") {
    const SessionConfig c = config_from_json(json::object());
    CHECK(c.seed == 0);
    CHECK(c.start_stage == 0);
    CHECK(c.codec.dimension == 512);
    CHECK(c.codec.cardinality == 10);
    CHECK(c.caregiver.walk_speed == 0.1);
    CHECK(c.drives.cry_threshold == 0.6);
    CHECK(c.schedule.durations == std::array<std::int64_t, 5>{2000, 5000, 5000, 5000, 5000});
    CHECK_FALSE(c.record_path);
}

TEST_CASE("round trip") {
    SessionConfig c;
    c.seed = 99;
    c.start_stage = 3;
    c.initial = {0.4, 0.2};
    c.schedule.durations = {10, 20, 30, 40, 50};
    c.drives.thirst_rate = 0.002;
    c.codec.frames_per_symbol = 4;
    c.caregiver.play_dwell = 12;
    c.initial_last_delivery = Substance::Milk;
    c.reflexes.orient = false;
    c.record_path = "/tmp/x.log";
    const json j = config_to_json(c);
    CHECK(config_to_json(config_from_json(j)) == j);
    CHECK(j["caregiver"]["initial_last_delivery"] == "milk");
}

TEST_CASE("shipped default config equals the built-in defaults") {
    const json shipped = read_json(std::string(CRADLE_CONFIG_DIR) + "/default.json");
    CHECK(config_to_json(config_from_json(shipped)) == config_to_json(SessionConfig{}));
    CHECK(config_to_json(load_config(std::string(CRADLE_CONFIG_DIR) + "/default.json")) ==
          config_to_json(SessionConfig{}));
}

TEST_CASE("shipped schema declares exactly the serialized fields") {
    const json schema = read_json(std::string(CRADLE_CONFIG_DIR) + "/schema.json");
    SessionConfig full;
    full.initial_last_delivery = Substance::Water;
    full.record_path = "x";
    const json j = config_to_json(full);
    same_keys(j, schema, "$");
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
        CHECK(j.contains(it.key()));
}

TEST_CASE("errors carry the field path") {
    CHECK(error_path(json::parse(R"({"bogus":1})")) == "bogus");
    CHECK(error_path(json::parse(R"({"caregiver":{"walk":1}})")) == "caregiver.walk");
    CHECK(error_path(json::parse(R"({"schedule":{"durations":[1,2,0,4,5]}})")) == "schedule.durations[2]");
    CHECK(error_path(json::parse(R"({"schedule":{"durations":[1,2,"x",4,5]}})")) == "schedule.durations[2]");
    CHECK(error_path(json::parse(R"({"schedule":{"durations":[1,2]}})")) == "schedule.durations");
    CHECK(error_path(json::parse(R"({"seed":-1})")) == "seed");
    CHECK(error_path(json::parse(R"({"seed":1.5})")) == "seed");
    CHECK(error_path(json::parse(R"({"start_stage":5})")) == "start_stage");
    CHECK(error_path(json::parse(R"({"initial":{"thirst":1.5}})")) == "initial.thirst");
    CHECK(error_path(json::parse(R"({"drives":{"cry_threshold":1.0}})")) == "drives.cry_threshold");
    CHECK(error_path(json::parse(R"({"drives":"fast"})")) == "drives");
    CHECK(error_path(json::parse(R"({"codec":{"cardinality":600}})")) == "codec.cardinality");
    CHECK(error_path(json::parse(R"({"caregiver":{"initial_last_delivery":"juice"}})")) ==
          "caregiver.initial_last_delivery");
    CHECK(error_path(json::parse(R"({"reflexes":{"cry":"yes"}})")) == "reflexes.cry");
    CHECK(error_path(json::parse(R"({"record_path":3})")) == "record_path");
    CHECK(error_path(json::parse("[]")) == "$");
    CHECK(error_path(json::parse(R"({"seed":3})")) == "<none>");
}

TEST_CASE("drive threshold also sets the reflex threshold") {
    const SessionConfig c = config_from_json(json::parse(R"({"drives":{"cry_threshold":0.4}})"));
    CHECK(c.reflexes.cry_threshold == 0.4);
    const SessionConfig d =
        config_from_json(json::parse(R"({"drives":{"cry_threshold":0.4},"reflexes":{"cry_threshold":0.5}})"));
    CHECK(d.reflexes.cry_threshold == 0.5);
}

TEST_CASE("null fields fall back to defaults") {
    const SessionConfig c = config_from_json(json::parse(R"({"seed":null,"codec":null})"));
    CHECK(c.seed == 0);
}

TEST_CASE("load_config errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
    const std::string path = "test_config_broken.json";
    {
        std::ofstream out(path);
        out << "{ \"seed\": ";
    }
    try {
        load_config(path);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.code() == "config_error");
        CHECK(std::string(e.what()).find("invalid JSON") != std::string::npos);
    }
    std::remove(path.c_str());
}
