#include "cradle/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "$" : path_, "expected an object");
    }

    void only(std::initializer_list<const char*> keys) const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known |= it.key() == k;
            if (!known) throw ConfigError(join(path_, it.key()), "unknown field");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    const json& at(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return join(path_, key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) throw ConfigError(path(key), "must be finite");
    }

    template <class Int>
    void integer(const char* key, Int& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (!v.is_number_unsigned()) throw ConfigError(path(key), "expected a non-negative integer");
        }
        out = v.get<Int>();
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
        out = v.get<bool>();
    }

private:
    const json& j_;
    std::string path_;
};

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

}  // namespace

void SessionConfig::validate() const {
    require(start_stage >= 0 && start_stage < kStageCount, "start_stage", "must lie in [0, 4]");
    require(initial.thirst >= 0.0 && initial.thirst <= 1.0, "initial.thirst", "must lie in [0, 1]");
    require(initial.hunger >= 0.0 && initial.hunger <= 1.0, "initial.hunger", "must lie in [0, 1]");
    for (std::size_t i = 0; i < schedule.durations.size(); ++i)
        require(schedule.durations[i] > 0, "schedule.durations[" + std::to_string(i) + "]",
                "stage boundaries must be strictly increasing (durations > 0)");
    require(drives.thirst_rate >= 0.0, "drives.thirst_rate", "must be non-negative");
    require(drives.hunger_rate >= 0.0, "drives.hunger_rate", "must be non-negative");
    require(drives.cry_threshold > 0.0 && drives.cry_threshold < 1.0, "drives.cry_threshold",
            "must lie in (0, 1)");
    require(codec.dimension > 0, "codec.dimension", "must be positive");
    require(codec.cardinality > 0 && codec.cardinality <= codec.dimension, "codec.cardinality",
            "must lie in [1, dimension]");
    require(codec.frames_per_symbol > 0, "codec.frames_per_symbol", "must be positive");
    require(codec.gap_frames >= 0, "codec.gap_frames", "must be non-negative");
    require(codec.theta_min >= 0, "codec.theta_min", "must be non-negative");
    require(caregiver.walk_speed > 0.0, "caregiver.walk_speed", "must be positive");
    require(caregiver.cry_intensity_threshold >= 0.0, "caregiver.cry_intensity_threshold", "must be non-negative");
    require(caregiver.narration_repeats >= 1, "caregiver.narration_repeats", "must be at least 1");
    require(caregiver.feeding_timeout > 0, "caregiver.feeding_timeout", "must be positive");
    require(caregiver.cry_absent_steps > 0, "caregiver.cry_absent_steps", "must be positive");
    require(caregiver.play_dwell >= 0, "caregiver.play_dwell", "must be non-negative");
    require(caregiver.play_interval >= 0, "caregiver.play_interval", "must be non-negative");
    require(caregiver.deliver_distance > 0.0, "caregiver.deliver_distance", "must be positive");
    require(caregiver.present_distance > 0.0, "caregiver.present_distance", "must be positive");
    require(reflexes.cry_threshold > 0.0 && reflexes.cry_threshold < 1.0, "reflexes.cry_threshold",
            "must lie in (0, 1)");
}

SessionConfig config_from_json(const json& j) {
    SessionConfig c;
    Reader r(j, "");
    r.only({"seed", "start_stage", "initial", "schedule", "drives", "codec", "caregiver", "reflexes", "record_path"});
    r.integer("seed", c.seed);
    r.integer("start_stage", c.start_stage);

    if (r.has("initial")) {
        Reader s(r.at("initial"), "initial");
        s.only({"thirst", "hunger"});
        s.number("thirst", c.initial.thirst);
        s.number("hunger", c.initial.hunger);
    }
    if (r.has("schedule")) {
        Reader s(r.at("schedule"), "schedule");
        s.only({"durations"});
        if (s.has("durations")) {
            const json& d = s.at("durations");
            require(d.is_array() && d.size() == kStageCount, "schedule.durations", "expected an array of 5 integers");
            for (std::size_t i = 0; i < d.size(); ++i) {
                const std::string p = "schedule.durations[" + std::to_string(i) + "]";
                require(d[i].is_number_integer(), p, "expected an integer");
                c.schedule.durations[i] = d[i].get<std::int64_t>();
            }
        }
    }
    if (r.has("drives")) {
        Reader s(r.at("drives"), "drives");
        s.only({"thirst_rate", "hunger_rate", "cry_threshold"});
        s.number("thirst_rate", c.drives.thirst_rate);
        s.number("hunger_rate", c.drives.hunger_rate);
        s.number("cry_threshold", c.drives.cry_threshold);
        c.reflexes.cry_threshold = c.drives.cry_threshold;
    }
    if (r.has("codec")) {
        Reader s(r.at("codec"), "codec");
        s.only({"dimension", "cardinality", "frames_per_symbol", "gap_frames", "theta_min"});
        s.integer("dimension", c.codec.dimension);
        s.integer("cardinality", c.codec.cardinality);
        s.integer("frames_per_symbol", c.codec.frames_per_symbol);
        s.integer("gap_frames", c.codec.gap_frames);
        s.integer("theta_min", c.codec.theta_min);
    }
    if (r.has("caregiver")) {
        Reader s(r.at("caregiver"), "caregiver");
        s.only({"walk_speed", "cry_intensity_threshold", "narration_repeats", "feeding_timeout",
                "word_overlap_threshold", "cry_absent_steps", "play_dwell", "play_interval", "deliver_distance",
                "present_distance", "initial_last_delivery"});
        auto& p = c.caregiver;
        s.number("walk_speed", p.walk_speed);
        s.number("cry_intensity_threshold", p.cry_intensity_threshold);
        s.integer("narration_repeats", p.narration_repeats);
        s.integer("feeding_timeout", p.feeding_timeout);
        s.number("word_overlap_threshold", p.word_overlap_threshold);
        s.integer("cry_absent_steps", p.cry_absent_steps);
        s.integer("play_dwell", p.play_dwell);
        s.integer("play_interval", p.play_interval);
        s.number("deliver_distance", p.deliver_distance);
        s.number("present_distance", p.present_distance);
        if (s.has("initial_last_delivery")) {
            const json& v = s.at("initial_last_delivery");
            require(v.is_string(), s.path("initial_last_delivery"), "expected \"water\" or \"milk\"");
            try {
                c.initial_last_delivery = substance_from_name(v.get<std::string>());
            } catch (const InvalidSubstance&) {
                throw ConfigError(s.path("initial_last_delivery"), "expected \"water\" or \"milk\"");
            }
        }
    }
    if (r.has("reflexes")) {
        Reader s(r.at("reflexes"), "reflexes");
        s.only({"server_side", "suck", "cry", "orient", "cry_threshold"});
        s.boolean("server_side", c.reflexes.server_side);
        s.boolean("suck", c.reflexes.suck);
        s.boolean("cry", c.reflexes.cry);
        s.boolean("orient", c.reflexes.orient);
        s.number("cry_threshold", c.reflexes.cry_threshold);
    }
    if (r.has("record_path")) {
        require(r.at("record_path").is_string(), "record_path", "expected a string");
        c.record_path = r.at("record_path").get<std::string>();
    }
    c.validate();
    return c;
}

json config_to_json(const SessionConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["start_stage"] = c.start_stage;
    j["initial"] = {{"thirst", c.initial.thirst}, {"hunger", c.initial.hunger}};
    j["schedule"] = {{"durations", c.schedule.durations}};
    j["drives"] = {{"thirst_rate", c.drives.thirst_rate},
                   {"hunger_rate", c.drives.hunger_rate},
                   {"cry_threshold", c.drives.cry_threshold}};
    j["codec"] = {{"dimension", c.codec.dimension},
                  {"cardinality", c.codec.cardinality},
                  {"frames_per_symbol", c.codec.frames_per_symbol},
                  {"gap_frames", c.codec.gap_frames},
                  {"theta_min", c.codec.theta_min}};
    const auto& p = c.caregiver;
    j["caregiver"] = {{"walk_speed", p.walk_speed},
                      {"cry_intensity_threshold", p.cry_intensity_threshold},
                      {"narration_repeats", p.narration_repeats},
                      {"feeding_timeout", p.feeding_timeout},
                      {"word_overlap_threshold", p.word_overlap_threshold},
                      {"cry_absent_steps", p.cry_absent_steps},
                      {"play_dwell", p.play_dwell},
                      {"play_interval", p.play_interval},
                      {"deliver_distance", p.deliver_distance},
                      {"present_distance", p.present_distance}};
    if (c.initial_last_delivery)
        j["caregiver"]["initial_last_delivery"] = std::string(substance_name(*c.initial_last_delivery));
    j["reflexes"] = {{"server_side", c.reflexes.server_side},
                     {"suck", c.reflexes.suck},
                     {"cry", c.reflexes.cry},
                     {"orient", c.reflexes.orient},
                     {"cry_threshold", c.reflexes.cry_threshold}};
    if (c.record_path) j["record_path"] = *c.record_path;
    return j;
}

SessionConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace cradle
