#pragma once

// Session configuration. Every field has a default, so `{}` is a complete
// config; unknown keys are rejected with their JSON path.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "cradle/caregiver.hpp"
#include "cradle/curriculum.hpp"
#include "cradle/drives.hpp"
#include "cradle/instincts.hpp"
#include "cradle/sdr.hpp"

namespace cradle {

struct SessionConfig {
    std::uint64_t seed = 0;
    int start_stage = 0;
    DriveState initial;
    StageSchedule schedule;
    DriveParams drives;
    CodecParams codec;
    CaregiverParams caregiver;
    std::optional<Substance> initial_last_delivery;
    ReflexConfig reflexes;
    std::optional<std::string> record_path;

    // Throws ConfigError with the path of the first invalid field.
    void validate() const;
};

SessionConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SessionConfig& config);

// Reads and parses a config file; ConfigError on I/O or JSON syntax problems.
SessionConfig load_config(const std::string& path);

}  // namespace cradle
