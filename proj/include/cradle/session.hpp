#pragma once

// Environment facade: reset / step, recording and replay.
//
// One step, state t -> t+1:
//   clamp + gate action, optional server-side reflexes, muscles,
//   deliver sounds queued last step, caregiver, world step, mouth contact,
//   drives tick then ingest, stage presence, observation + gating, record.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cradle/body.hpp"
#include "cradle/caregiver.hpp"
#include "cradle/config.hpp"
#include "cradle/curriculum.hpp"
#include "cradle/instincts.hpp"
#include "cradle/observation.hpp"
#include "cradle/world.hpp"

namespace cradle {

class Session {
public:
    Session() = default;
    explicit Session(SessionConfig config) : config_(std::move(config)) {}

    ObservationFrame reset();
    ObservationFrame reset(SessionConfig config);

    // Throws NoSession before reset.
    ObservationFrame step(ActionCommand action);
    // Wire form: decodes the action (ActionDecodeError leaves the session untouched).
    nlohmann::json step_json(const nlohmann::json& action);

    bool live() const noexcept { return live_; }
    std::int64_t t() const noexcept { return world_.step; }
    const SessionConfig& config() const noexcept { return config_; }
    const WorldState& world() const noexcept { return world_; }
    const AgentBody& body() const noexcept { return body_; }
    const DriveState& drives() const noexcept { return drives_; }
    const CaregiverState& caregiver() const noexcept { return caregiver_; }
    const SdrCodebook& codebook() const noexcept { return codebook_; }
    const ObservationFrame& last_observation() const noexcept { return last_obs_; }
    int stage() const noexcept { return stage_; }
    const GatingMask& mask() const noexcept { return config_.schedule.masks[static_cast<std::size_t>(stage_)]; }

    // Probe set-up hooks. Changes made here show up from the next step on.
    WorldState& world_mut() noexcept { return world_; }
    AgentBody& body_mut() noexcept { return body_; }
    DriveState& drives_mut() noexcept { return drives_; }
    CaregiverState& caregiver_mut() noexcept { return caregiver_; }

    std::uint64_t hash() const { return world_hash(world_); }

    // Each reset writes a header; each step appends one line. Null stops recording.
    void record_to(std::ostream* out) noexcept { record_ = out; }

private:
    void sync_stage(std::vector<Event>& events, bool announce);
    ObservationFrame observe(std::vector<Event> events, const AudioSense& audio);
    void write_header();
    void write_entry(const ActionCommand* action, const ObservationFrame& obs);

    SessionConfig config_;
    bool live_ = false;
    std::int64_t stage_offset_ = 0;
    int stage_ = 0;
    SdrCodebook codebook_;
    WorldState world_;
    AgentBody body_;
    DriveState drives_;
    CaregiverState caregiver_;
    ReflexSet reflexes_;
    ObservationFrame last_obs_;
    bool heard_last_step_ = false;

    std::ostream* record_ = nullptr;
    std::shared_ptr<std::ofstream> record_file_;
};

std::string hash_hex(std::uint64_t h);

// Log lines: a header {"type":"header","version":1,"config":{...}}, then
// {"t","action","obs","world_hash"} per step starting with t=0 (action null).
struct ReplayReport {
    std::size_t entries = 0;
    std::optional<std::int64_t> first_divergence;
    std::string reason;
    bool ok() const noexcept { return !first_divergence; }
};

// Throws LogParseError (with a 1-based line number) on corrupt input.
ReplayReport replay(std::istream& log);

}  // namespace cradle
