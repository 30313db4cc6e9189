#pragma once

// Observation and action records exchanged between the environment and an
// agent, plus their JSON wire form. Observations carry interoception and
// never any reward-like quantity.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cradle/body.hpp"
#include "cradle/drives.hpp"
#include "cradle/sdr.hpp"

namespace cradle {

enum class VocalKind { None, Cry, Speech };

struct Vocal {
    VocalKind kind = VocalKind::None;
    double loudness = 0.0;  // cry only, [0, 1]
    SdrFrame frame;         // speech only

    static Vocal none() { return {}; }
    static Vocal cry(double loudness) { return {VocalKind::Cry, loudness, {}}; }
    static Vocal speech(SdrFrame f) { return {VocalKind::Speech, 0.0, std::move(f)}; }
    bool operator==(const Vocal&) const = default;
};

struct ActionCommand {
    MuscleCommand muscles;
    Vocal vocal;
    bool operator==(const ActionCommand&) const = default;
};

struct Event {
    std::string tag;
    std::string detail;
    bool operator==(const Event&) const = default;
};

struct AudioSense {
    SdrFrame frame;           // empty when nothing was heard
    double intensity = 0.0;
    double bearing = 0.0;     // relative to gaze, positive to the left
    bool onset = false;       // heard now, silent on the previous step
    bool operator==(const AudioSense&) const = default;
};

struct Proprioception {
    double gaze = 0.0;
    double arm_extension = 0.0;
    double arm_angle = 0.0;
    double grasp = 0.0;
    double suck = 0.0;
    bool operator==(const Proprioception&) const = default;
};

struct ObservationFrame {
    std::int64_t t = 0;
    int stage = 0;
    Retina retina;
    AudioSense audio;
    TouchGrid touch;
    Proprioception proprio;
    DriveState intero;
    std::vector<Event> events;
    bool gated = false;  // stage gating already applied; not serialized

    bool has_event(std::string_view tag) const;
    bool has_event(std::string_view tag, std::string_view detail) const;
};

nlohmann::json action_to_json(const ActionCommand& action);
// Throws ActionDecodeError on missing/ill-typed fields or invalid frames.
ActionCommand action_from_json(const nlohmann::json& j, int dimension);

nlohmann::json observation_to_json(const ObservationFrame& obs);
ObservationFrame observation_from_json(const nlohmann::json& j, int dimension);

// Field layout of observations and actions, published in the `hello` message.
nlohmann::json observation_schema();

}  // namespace cradle
