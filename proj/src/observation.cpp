#include "cradle/observation.hpp"

#include <algorithm>

#include "cradle/error.hpp"

namespace cradle {

using nlohmann::json;

bool ObservationFrame::has_event(std::string_view tag) const {
    return std::any_of(events.begin(), events.end(), [&](const Event& e) { return e.tag == tag; });
}

bool ObservationFrame::has_event(std::string_view tag, std::string_view detail) const {
    return std::any_of(events.begin(), events.end(),
                       [&](const Event& e) { return e.tag == tag && e.detail == detail; });
}

json action_to_json(const ActionCommand& a) {
    json vocal;
    switch (a.vocal.kind) {
        case VocalKind::None: vocal = {{"type", "none"}}; break;
        case VocalKind::Cry: vocal = {{"type", "cry"}, {"loudness", a.vocal.loudness}}; break;
        case VocalKind::Speech: vocal = {{"type", "speech"}, {"frame", frame_to_json(a.vocal.frame)}}; break;
    }
    return {{"muscles",
             {{"head_turn", a.muscles.head_turn},
              {"arm_turn", a.muscles.arm_turn},
              {"arm_extend", a.muscles.arm_extend},
              {"grasp", a.muscles.grasp},
              {"suck", a.muscles.suck}}},
            {"vocal", vocal}};
}

namespace {

double number_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return 0.0;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ActionDecodeError(where + "." + key + " must be a number");
    return v.get<double>();
}

}  // namespace

ActionCommand action_from_json(const json& j, int dimension) {
    if (!j.is_object()) throw ActionDecodeError("action must be an object");
    ActionCommand a;
    if (j.contains("muscles")) {
        const auto& m = j.at("muscles");
        if (!m.is_object()) throw ActionDecodeError("muscles must be an object");
        for (const auto& [key, _] : m.items()) {
            static const std::array<std::string_view, 5> known{"head_turn", "arm_turn", "arm_extend", "grasp", "suck"};
            if (std::find(known.begin(), known.end(), key) == known.end())
                throw ActionDecodeError("unknown muscle channel '" + key + "'");
        }
        a.muscles.head_turn = number_field(m, "head_turn", "muscles");
        a.muscles.arm_turn = number_field(m, "arm_turn", "muscles");
        a.muscles.arm_extend = number_field(m, "arm_extend", "muscles");
        a.muscles.grasp = number_field(m, "grasp", "muscles");
        a.muscles.suck = number_field(m, "suck", "muscles");
    }
    if (j.contains("vocal") && !j.at("vocal").is_null()) {
        const auto& v = j.at("vocal");
        if (!v.is_object() || !v.contains("type") || !v.at("type").is_string())
            throw ActionDecodeError("vocal must be an object with a string 'type'");
        const auto type = v.at("type").get<std::string>();
        if (type == "none") {
            a.vocal = Vocal::none();
        } else if (type == "cry") {
            a.vocal = Vocal::cry(std::clamp(number_field(v, "loudness", "vocal"), 0.0, 1.0));
        } else if (type == "speech") {
            if (!v.contains("frame")) throw ActionDecodeError("speech vocal requires 'frame'");
            try {
                a.vocal = Vocal::speech(frame_from_json(v.at("frame"), dimension));
            } catch (const Error& e) {
                throw ActionDecodeError(std::string("vocal.frame: ") + e.what());
            }
        } else {
            throw ActionDecodeError("unknown vocal type '" + type + "'");
        }
    }
    return a;
}

json observation_to_json(const ObservationFrame& o) {
    json kinds(json::value_t::array);
    json depths(json::value_t::array);
    auto& kv = kinds.get_ref<json::array_t&>();
    auto& dv = depths.get_ref<json::array_t&>();
    kv.reserve(o.retina.cells.size());
    dv.reserve(o.retina.cells.size());
    for (const auto& c : o.retina.cells) {
        kv.emplace_back(c.kind);
        dv.emplace_back(c.depth);
    }
    json torso(json::value_t::array);
    auto& tv = torso.get_ref<json::array_t&>();
    tv.reserve(o.touch.torso.size());
    for (double v : o.touch.torso) tv.emplace_back(v);
    json events = json::array();
    for (const auto& e : o.events) events.push_back({{"tag", e.tag}, {"detail", e.detail}});
    return {{"t", o.t},
            {"stage", o.stage},
            {"retina", {{"kind", std::move(kinds)}, {"depth", std::move(depths)}}},
            {"audio",
             {{"frame", frame_to_json(o.audio.frame)},
              {"intensity", o.audio.intensity},
              {"bearing", o.audio.bearing},
              {"onset", o.audio.onset}}},
            {"touch",
             {{"torso", std::move(torso)}, {"mouth", o.touch.mouth}, {"hand", o.touch.hand}, {"crib", o.touch.crib}}},
            {"proprio",
             {{"gaze", o.proprio.gaze},
              {"arm", {{"extension", o.proprio.arm_extension}, {"angle", o.proprio.arm_angle}}},
              {"grasp", o.proprio.grasp},
              {"suck", o.proprio.suck}}},
            {"intero", {{"thirst", o.intero.thirst}, {"hunger", o.intero.hunger}}},
            {"events", events}};
}

ObservationFrame observation_from_json(const json& j, int dimension) {
    ObservationFrame o;
    o.t = j.at("t").get<std::int64_t>();
    o.stage = j.at("stage").get<int>();
    const auto& kinds = j.at("retina").at("kind");
    const auto& depths = j.at("retina").at("depth");
    if (kinds.size() != o.retina.cells.size() || depths.size() != o.retina.cells.size())
        throw InvalidParameter("retina must hold 256 cells");
    for (std::size_t i = 0; i < o.retina.cells.size(); ++i)
        o.retina.cells[i] = {kinds[i].get<int>(), depths[i].get<double>()};
    const auto& audio = j.at("audio");
    o.audio.frame = frame_from_json(audio.at("frame"), dimension);
    o.audio.intensity = audio.at("intensity").get<double>();
    o.audio.bearing = audio.at("bearing").get<double>();
    o.audio.onset = audio.at("onset").get<bool>();
    const auto& touch = j.at("touch");
    o.touch.torso = touch.at("torso").get<std::array<double, 64>>();
    o.touch.mouth = touch.at("mouth").get<double>();
    o.touch.hand = touch.at("hand").get<double>();
    o.touch.crib = touch.at("crib").get<double>();
    const auto& p = j.at("proprio");
    o.proprio.gaze = p.at("gaze").get<double>();
    o.proprio.arm_extension = p.at("arm").at("extension").get<double>();
    o.proprio.arm_angle = p.at("arm").at("angle").get<double>();
    o.proprio.grasp = p.at("grasp").get<double>();
    o.proprio.suck = p.at("suck").get<double>();
    o.intero.thirst = j.at("intero").at("thirst").get<double>();
    o.intero.hunger = j.at("intero").at("hunger").get<double>();
    for (const auto& e : j.at("events")) o.events.push_back({e.at("tag").get<std::string>(), e.at("detail").get<std::string>()});
    o.gated = true;
    return o;
}

json observation_schema() {
    return {
        {"observation",
         {{"t", "integer step"},
          {"stage", "integer 0-4"},
          {"retina", {{"kind", "256 kind codes, row-major 16x16"}, {"depth", "256 numbers in [0,1], row-major 16x16"}}},
          {"audio", {{"frame", "sorted index list"}, {"intensity", "number"}, {"bearing", "radians relative to gaze"}, {"onset", "boolean"}}},
          {"touch", {{"torso", "64 numbers, 8x8 row-major"}, {"mouth", "number"}, {"hand", "number"}, {"crib", "number"}}},
          {"proprio", {{"gaze", "radians"}, {"arm", {{"extension", "number"}, {"angle", "radians"}}}, {"grasp", "number"}, {"suck", "number"}}},
          {"intero", {{"thirst", "number"}, {"hunger", "number"}}},
          {"events", "list of {tag, detail}"}}},
        {"action",
         {{"muscles", {{"head_turn", "[-1,1]"}, {"arm_turn", "[-1,1]"}, {"arm_extend", "[-1,1]"}, {"grasp", "[0,1]"}, {"suck", "[0,1]"}}},
          {"vocal", "{type: none} | {type: cry, loudness} | {type: speech, frame}"}}},
        {"kind_codes",
         {{"none", 0}, {"agent", 1}, {"caregiver", 2}, {"crib", 3}, {"wall", 4}, {"toy", 5}, {"bottle_water", 6}, {"bottle_milk", 7}}},
    };
}

}  // namespace cradle
